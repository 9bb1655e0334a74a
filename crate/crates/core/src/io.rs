//! File formats: JSON-lines demonstration logs, ground-truth files, the
//! dataset manifest and the configuration document.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::demogen::{NoiseParams, ScriptStep, TaskSpec};
use crate::domain::{Event, Goal, ObjectId, SceneConfig};
use crate::eval::EvalParams;
use crate::geometry::{Point2, Pose2};
use crate::recognizer::RecognizerParams;
use crate::segmentation::{Demonstration, Frame, SegmentationError};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse { path: PathBuf, line: usize, message: String },
    #[error("{path}: {source}")]
    Demo {
        path: PathBuf,
        #[source]
        source: SegmentationError,
    },
    #[error("checksum mismatch for {0}")]
    Checksum(PathBuf),
}

impl IoError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        IoError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    fn parse(path: &Path, line: usize, message: impl ToString) -> Self {
        IoError::Parse {
            path: path.to_path_buf(),
            line,
            message: message.to_string(),
        }
    }
}

/// Serde adapter for reals that may be infinite: non-finite values are
/// written as the strings `"inf"`, `"-inf"` and `"nan"`.
pub mod extended_f64 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Str(s) => match s.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(serde::de::Error::custom(format!("invalid real `{other}`"))),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameRecord {
    pub t: f64,
    pub poses: BTreeMap<ObjectId, [f64; 3]>,
    pub in_hand: Option<ObjectId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub t: f64,
    #[serde(flatten)]
    pub event: Event,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Record {
    Header(SceneConfig),
    Frame(FrameRecord),
    Event(EventRecord),
}

/// Writes a demonstration as JSON lines: header, then frames with their
/// events following each frame.
pub fn demo_to_jsonl(demo: &Demonstration) -> String {
    let mut out = String::new();
    let mut push = |r: &Record| {
        out.push_str(&serde_json::to_string(r).expect("records serialize"));
        out.push('\n');
    };
    push(&Record::Header(demo.scene().clone()));
    for f in demo.frames() {
        push(&Record::Frame(FrameRecord {
            t: f.t,
            poses: f
                .poses
                .iter()
                .map(|(id, p)| (id.clone(), [p.position.x, p.position.y, p.heading()]))
                .collect(),
            in_hand: f.in_hand.clone(),
        }));
        for e in &f.events {
            push(&Record::Event(EventRecord {
                t: f.t,
                event: e.clone(),
            }));
        }
    }
    out
}

pub fn parse_demo(text: &str, path: &Path) -> Result<Demonstration, IoError> {
    let mut scene: Option<SceneConfig> = None;
    let mut frames: Vec<Frame> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let rec: Record = serde_json::from_str(line).map_err(|e| IoError::parse(path, lineno, e))?;
        match rec {
            Record::Header(s) => {
                if scene.is_some() {
                    return Err(IoError::parse(path, lineno, "duplicate header"));
                }
                s.validate().map_err(|e| IoError::parse(path, lineno, e))?;
                scene = Some(s);
            }
            Record::Frame(f) => {
                if scene.is_none() {
                    return Err(IoError::parse(path, lineno, "frame before header"));
                }
                frames.push(Frame {
                    t: f.t,
                    poses: f
                        .poses
                        .into_iter()
                        .map(|(id, [x, y, th])| (id, Pose2::new(Point2::new(x, y), th)))
                        .collect(),
                    in_hand: f.in_hand,
                    events: vec![],
                });
            }
            Record::Event(e) => {
                if matches!(e.event, Event::Cook { .. }) {
                    return Err(IoError::parse(path, lineno, "cook events are derived, not logged"));
                }
                // attach to the latest frame at or before the event time
                let idx = frames.iter().rposition(|f| f.t <= e.t + 1e-9).unwrap_or(0);
                match frames.get_mut(idx) {
                    Some(f) => f.events.push(e.event),
                    None => return Err(IoError::parse(path, lineno, "event before any frame")),
                }
            }
        }
    }
    let scene = scene.ok_or_else(|| IoError::parse(path, 1, "missing header"))?;
    Demonstration::new(scene, frames).map_err(|source| IoError::Demo {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_demo(path: &Path) -> Result<Demonstration, IoError> {
    let text = fs::read_to_string(path).map_err(|e| IoError::io(path, e))?;
    parse_demo(&text, path)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthFile {
    #[serde(flatten)]
    pub goal: Goal,
    pub task: TaskSpec,
    pub seed: u64,
    pub script: Vec<ScriptStep>,
}

pub fn read_truth(path: &Path) -> Result<TruthFile, IoError> {
    let text = fs::read_to_string(path).map_err(|e| IoError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| IoError::parse(path, e.line(), e))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub task_index: usize,
    pub task: TaskSpec,
    pub demo_index: usize,
    pub seed: u64,
    pub demo_file: String,
    pub truth_file: String,
    pub demo_sha256: String,
    pub truth_sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: String,
    pub master_seed: u64,
    pub entries: Vec<ManifestEntry>,
}

pub const MANIFEST_FILE: &str = "manifest.json";

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn read_manifest(dir: &Path) -> Result<Manifest, IoError> {
    let path = dir.join(MANIFEST_FILE);
    let text = fs::read_to_string(&path).map_err(|e| IoError::io(&path, e))?;
    serde_json::from_str(&text).map_err(|e| IoError::parse(&path, e.line(), e))
}

/// Reads a file and checks it against the recorded digest.
pub fn read_verified(dir: &Path, name: &str, sha: &str) -> Result<String, IoError> {
    let path = dir.join(name);
    let bytes = fs::read(&path).map_err(|e| IoError::io(&path, e))?;
    if sha256_hex(&bytes) != sha {
        return Err(IoError::Checksum(path));
    }
    String::from_utf8(bytes).map_err(|e| IoError::parse(&path, 0, e))
}

/// Writes via a sibling temp file and a rename, so readers never observe a
/// partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), IoError> {
    let tmp = path.with_extension("tmp");
    let mut f = fs::File::create(&tmp).map_err(|e| IoError::io(&tmp, e))?;
    f.write_all(contents).map_err(|e| IoError::io(&tmp, e))?;
    f.sync_all().map_err(|e| IoError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| IoError::io(path, e))
}

pub fn to_pretty_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// The single configuration document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub schema_version: String,
    pub master_seed: u64,
    pub scene: SceneConfig,
    pub recognizer: RecognizerParams,
    pub noise: NoiseParams,
    pub eval: EvalParams,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            schema_version: crate::SCHEMA_VERSION.to_string(),
            master_seed: 20200,
            scene: SceneConfig::mockup_kitchen(),
            recognizer: RecognizerParams::default(),
            noise: NoiseParams::default(),
            eval: EvalParams::default(),
        }
    }
}

impl Config {
    pub fn parse(text: &str, path: &Path) -> Result<Self, IoError> {
        let c: Config = serde_json::from_str(text).map_err(|e| IoError::parse(path, e.line(), e))?;
        if c.schema_version != crate::SCHEMA_VERSION {
            return Err(IoError::parse(
                path,
                1,
                format!("schema version {} is not {}", c.schema_version, crate::SCHEMA_VERSION),
            ));
        }
        c.scene.validate().map_err(|e| IoError::parse(path, 1, e))?;
        c.recognizer
            .intent
            .planner
            .validate()
            .map_err(|e| IoError::parse(path, 1, e))?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self, IoError> {
        let text = fs::read_to_string(path).map_err(|e| IoError::io(path, e))?;
        Self::parse(&text, path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extended_reals_roundtrip() {
        #[derive(Serialize, Deserialize, PartialEq, Debug)]
        struct W(#[serde(with = "extended_f64")] f64);
        for v in [1.5, f64::INFINITY, f64::NEG_INFINITY] {
            let j = serde_json::to_string(&W(v)).unwrap();
            assert_eq!(serde_json::from_str::<W>(&j).unwrap(), W(v));
        }
        assert_eq!(serde_json::to_string(&W(f64::INFINITY)).unwrap(), "\"inf\"");
    }

    #[test]
    fn default_config_roundtrips() {
        let c = Config::default();
        let text = to_pretty_json(&c);
        assert_eq!(Config::parse(&text, Path::new("cfg")).unwrap(), c);
    }

    #[test]
    fn header_line_shape() {
        let r = Record::Header(SceneConfig::mockup_kitchen());
        let j = serde_json::to_string(&r).unwrap();
        assert!(j.starts_with(r#"{"kind":"header","scene":"mockup_kitchen""#));
        let e = Record::Event(EventRecord {
            t: 1.0,
            event: Event::Pour {
                from: ObjectId::new("spam"),
                to: ObjectId::new("bowl"),
            },
        });
        assert_eq!(
            serde_json::to_string(&e).unwrap(),
            r#"{"kind":"event","t":1.0,"event":"pour","from":"spam","to":"bowl"}"#
        );
    }
}
