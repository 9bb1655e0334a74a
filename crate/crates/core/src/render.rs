//! Static SVG rendering of a demonstration and its recognition trace.

use std::fmt::Write as _;

use thiserror::Error;

use crate::domain::Predicate;
use crate::geometry::{Point2, Polyline};
use crate::intent::{cspace_at, task_goal_set, Decision, IntentError};
use crate::planner::{plan, GoalSpec, PlannerParams};
use crate::recognizer::{Trace, TraceSegment};
use crate::segmentation::Demonstration;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RenderError {
    #[error("trace segment {0} does not fit the demonstration")]
    Mismatch(usize),
    #[error(transparent)]
    Intent(#[from] IntentError),
}

const SCALE: f64 = 600.0;
const PAD: f64 = 20.0;

struct Canvas {
    out: String,
    height_m: f64,
    x0: f64,
    y0: f64,
}

impl Canvas {
    fn x(&self, p: Point2) -> f64 {
        PAD + (p.x - self.x0) * SCALE
    }

    fn y(&self, p: Point2) -> f64 {
        PAD + (self.y0 + self.height_m - p.y) * SCALE
    }

    fn points(&self, pts: &[Point2]) -> String {
        pts.iter()
            .map(|&p| format!("{:.2},{:.2}", self.x(p), self.y(p)))
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn polyline(&mut self, class: &str, line: &Polyline, color: &str) {
        let pts = self.points(line.vertices());
        let _ = writeln!(
            self.out,
            r#"<polyline class="{class}" points="{pts}" fill="none" stroke="{color}" stroke-width="2"/>"#
        );
    }

    fn circle(&mut self, class: &str, c: Point2, r: f64, style: &str) {
        let _ = writeln!(
            self.out,
            r#"<circle class="{class}" cx="{:.2}" cy="{:.2}" r="{:.2}" {style}/>"#,
            self.x(c),
            self.y(c),
            r * SCALE
        );
    }

    fn text(&mut self, p: Point2, dy: f64, body: &str) {
        let _ = writeln!(
            self.out,
            r#"<text x="{:.2}" y="{:.2}" font-family="monospace" font-size="11">{}</text>"#,
            self.x(p),
            self.y(p) + dy,
            escape(body)
        );
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn decision_color(d: Decision) -> &'static str {
    match d {
        Decision::Task | Decision::BothTrivialTask => "#1f77b4",
        Decision::Motion | Decision::TrivialMotion => "#d62728",
        Decision::Noise => "#7f7f7f",
    }
}

fn hypothesis_goals(seg: &TraceSegment, demo: &Demonstration) -> Vec<(&'static str, GoalSpec)> {
    let mut out = Vec::new();
    if seg.scores.contains_key("task") {
        let placement = seg
            .achieved
            .iter()
            .find(|p| matches!(p, Predicate::InRegion(o, _) if *o == seg.object));
        if let Some(g) = placement.and_then(|p| task_goal_set(p, demo.scene())) {
            out.push(("task", g));
        }
    }
    if let (true, Some(m)) = (seg.scores.contains_key("motion"), &seg.motion) {
        out.push(("motion", m.goal_set()));
    }
    out
}

/// Renders regions, footprints, trajectories, enabling hulls, replanned
/// optimal paths and score annotations. Output is a pure function of the
/// inputs.
pub fn render_svg(demo: &Demonstration, trace: &Trace, planner: &PlannerParams) -> Result<String, RenderError> {
    let scene = demo.scene();
    let table = scene.table;
    let mut c = Canvas {
        out: String::new(),
        height_m: table.height(),
        x0: table.min().x,
        y0: table.min().y,
    };
    let (w, h) = (table.width() * SCALE + 2.0 * PAD, table.height() * SCALE + 2.0 * PAD);
    let _ = writeln!(
        c.out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}">"#
    );
    let _ = writeln!(
        c.out,
        r##"<rect class="table" x="{PAD}" y="{PAD}" width="{:.2}" height="{:.2}" fill="#fbf8f0" stroke="#333"/>"##,
        table.width() * SCALE,
        table.height() * SCALE
    );
    for r in &scene.regions {
        let b = r.bounds;
        let _ = writeln!(
            c.out,
            r##"<rect class="region" x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#2ca02c" stroke-dasharray="6 3"/>"##,
            c.x(Point2::new(b.min().x, b.max().y)),
            c.y(Point2::new(b.min().x, b.max().y)),
            b.width() * SCALE,
            b.height() * SCALE
        );
        c.text(Point2::new(b.min().x, b.max().y), 12.0, r.id.as_str());
    }

    let frames = demo.frames();
    if let (Some(first), Some(last)) = (frames.first(), frames.last()) {
        for (id, pose) in &first.poses {
            let r = scene.radius(id).unwrap_or(0.0);
            c.circle("start", pose.position, r, r##"fill="none" stroke="#999" stroke-dasharray="3 2""##);
        }
        for (id, pose) in &last.poses {
            let r = scene.radius(id).unwrap_or(0.0);
            c.circle("footprint", pose.position, r, r##"fill="#ddd" fill-opacity="0.6" stroke="#333""##);
            c.text(pose.position, 4.0, id.as_str());
        }
    }

    for seg in &trace.segments {
        if seg.frame_range[1] >= frames.len() {
            return Err(RenderError::Mismatch(seg.index));
        }
        if let Some(m) = &seg.motion {
            let mut pts = m.hull.vertices().to_vec();
            if let Some(&p0) = pts.first() {
                pts.push(p0);
            }
            let pts = c.points(&pts);
            let _ = writeln!(
                c.out,
                r##"<polygon class="hull" points="{pts}" fill="#ff7f0e" fill-opacity="0.15" stroke="#ff7f0e"/>"##
            );
        }
        c.polyline("trajectory", &seg.trajectory, decision_color(seg.decision));

        let (s, q) = (seg.trajectory.first(), seg.trajectory.last());
        let goals = hypothesis_goals(seg, demo);
        if !goals.is_empty() {
            let cs = cspace_at(demo, &seg.object, seg.frame_range[0], s, q)?;
            for (name, g) in goals {
                if let Ok(res) = plan(&cs, s, &g, planner) {
                    if res.goal_reached && res.path.len() > 1 {
                        let color = if name == "task" { "#1f77b4" } else { "#d62728" };
                        let pts = c.points(res.path.vertices());
                        let _ = writeln!(
                            c.out,
                            r#"<polyline class="plan plan-{name}" points="{pts}" fill="none" stroke="{color}" stroke-width="1" stroke-dasharray="4 3"/>"#
                        );
                    }
                }
            }
        }

        let mut label = format!("#{} {} {}", seg.index, seg.object, seg.decision.as_str());
        for (name, sc) in &seg.scores {
            let _ = write!(label, " {name}={:.4}", sc.log_likelihood);
        }
        c.text(q, -10.0, &label);
    }
    c.out.push_str("</svg>\n");
    Ok(c.out)
}
