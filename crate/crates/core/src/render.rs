//! SVG frames of a recorded run.

use glam::DVec2;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::engine::{ClusterRecord, Event, QueueAction, Trace};
use crate::ids::{LocationId, RobotId};
use crate::world::OccupancyGrid;

const DEFAULT_COLORS: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

/// Drawing options. Every field is optional in the style file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RenderStyle {
    /// Meters per pixel.
    pub scale: f64,
    /// Cycled when there are more robots than colors.
    pub robot_colors: Vec<String>,
    pub show_paths: bool,
    pub show_obstacles: bool,
    pub show_clusters: bool,
    pub show_queues: bool,
    pub show_rooms: bool,
    pub show_humans: bool,
}

impl Default for RenderStyle {
    fn default() -> Self {
        Self {
            scale: 0.05,
            robot_colors: DEFAULT_COLORS.iter().map(|c| c.to_string()).collect(),
            show_paths: true,
            show_obstacles: true,
            show_clusters: true,
            show_queues: true,
            show_rooms: true,
            show_humans: true,
        }
    }
}

impl RenderStyle {
    pub fn parse(text: &str) -> Result<Self, String> {
        let style: RenderStyle = serde_yaml::from_str(text).map_err(|e| e.to_string())?;
        style.validate()?;
        Ok(style)
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(format!("scale must be positive, got {}", self.scale));
        }
        if self.robot_colors.is_empty() {
            return Err("robot_colors must not be empty".into());
        }
        Ok(())
    }

    fn color(&self, robot: RobotId) -> &str {
        &self.robot_colors[robot.0 % self.robot_colors.len()]
    }
}

/// One rendered frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub time: f64,
    pub svg: String,
}

#[derive(Debug, Clone, Copy)]
struct Pose {
    x: f64,
    y: f64,
    theta: f64,
}

/// Replayed view of the trace at one tick.
#[derive(Default)]
struct View {
    robots: BTreeMap<RobotId, Pose>,
    humans: BTreeMap<usize, DVec2>,
    paths: BTreeMap<RobotId, Vec<[f64; 2]>>,
    obstacles: BTreeMap<RobotId, Vec<[f64; 2]>>,
    clusters: Vec<ClusterRecord>,
    queues: BTreeMap<LocationId, Vec<RobotId>>,
}

impl View {
    fn apply(&mut self, e: &Event) {
        match e {
            Event::Robot { robot, x, y, theta, .. } => {
                self.robots.insert(*robot, Pose { x: *x, y: *y, theta: *theta });
            }
            Event::Human { human, x, y, .. } => {
                self.humans.insert(*human, DVec2::new(*x, *y));
            }
            Event::PlanResult { robot, ok, points, .. } => {
                if *ok {
                    self.paths.insert(*robot, points.clone());
                } else {
                    self.paths.remove(robot);
                }
            }
            Event::Obstacles { robot, points, .. } => {
                self.obstacles.insert(*robot, points.clone());
            }
            Event::Clusters { clusters, .. } => self.clusters = clusters.clone(),
            Event::Queue { room, robot, action, .. } => {
                let q = self.queues.entry(*room).or_default();
                match action {
                    QueueAction::Request => q.push(*robot),
                    QueueAction::Release | QueueAction::Withdraw => q.retain(|r| r != robot),
                    QueueAction::Grant | QueueAction::Full => {}
                }
            }
            _ => {}
        }
    }
}

/// Frame times `0, every, 2 every, ...` up to and including the last recorded tick.
pub fn sample_times(trace: &Trace, every: f64) -> Vec<f64> {
    let ticks: BTreeSet<u64> =
        trace.events.iter().filter(|e| matches!(e, Event::Robot { .. })).map(|e| e.time().to_bits()).collect();
    let Some(last) = ticks.iter().map(|&b| f64::from_bits(b)).reduce(f64::max) else { return Vec::new() };
    let dt = trace.header.control_period;
    let mut out = Vec::new();
    let mut k = 0usize;
    loop {
        let target = k as f64 * every;
        if target > last + 1e-9 {
            break;
        }
        // Snap to the recorded tick grid.
        let t = crate::geom::round_sig9((target / dt).round() * dt);
        if out.last() != Some(&t) {
            out.push(t);
        }
        k += 1;
    }
    out
}

/// Renders one frame per sampled tick. `every <= 0` renders every control tick.
pub fn render_frames(trace: &Trace, grid: &OccupancyGrid, every: f64, style: &RenderStyle) -> Vec<Frame> {
    let every = if every > 0.0 { every } else { trace.header.control_period };
    let times = sample_times(trace, every);
    let background = background(trace, grid, style);
    let mut view = View::default();
    let mut frames = Vec::with_capacity(times.len());
    let mut i = 0;
    for &t in &times {
        // Obstacle sets are per tick; stale ones are dropped.
        view.obstacles.clear();
        while i < trace.events.len() && trace.events[i].time() <= t + 1e-9 {
            if trace.events[i].time() < t - 1e-9 {
                if let Event::Obstacles { .. } = trace.events[i] {
                    i += 1;
                    continue;
                }
            }
            view.apply(&trace.events[i]);
            i += 1;
        }
        frames.push(Frame { time: t, svg: draw(trace, grid, &background, &view, t, style) });
    }
    frames
}

struct Canvas {
    origin: DVec2,
    height_m: f64,
    scale: f64,
}

impl Canvas {
    fn px(&self, p: DVec2) -> (f64, f64) {
        ((p.x - self.origin.x) / self.scale, (self.height_m - (p.y - self.origin.y)) / self.scale)
    }

    fn len(&self, meters: f64) -> f64 {
        meters / self.scale
    }
}

fn canvas(grid: &OccupancyGrid, style: &RenderStyle) -> Canvas {
    let g = &grid.geometry;
    Canvas { origin: g.origin, height_m: g.height as f64 * g.resolution, scale: style.scale }
}

fn f(x: f64) -> String {
    format!("{:.2}", x)
}

/// Static layers: occupied cells (merged per row), rooms and queue slots.
fn background(trace: &Trace, grid: &OccupancyGrid, style: &RenderStyle) -> String {
    let c = canvas(grid, style);
    let g = &grid.geometry;
    let mut out = String::new();
    out.push_str("<g class=\"map\" fill=\"#222\">\n");
    for iy in 0..g.height {
        let mut ix = 0;
        while ix < g.width {
            if !grid.is_occupied(ix, iy) {
                ix += 1;
                continue;
            }
            let start = ix;
            while ix < g.width && grid.is_occupied(ix, iy) {
                ix += 1;
            }
            let top_left = g.origin + DVec2::new(start as f64, (iy + 1) as f64) * g.resolution;
            let (x, y) = c.px(top_left);
            let w = c.len((ix - start) as f64 * g.resolution);
            let h = c.len(g.resolution);
            writeln!(out, "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\"/>", f(x), f(y), f(w), f(h)).unwrap();
        }
    }
    out.push_str("</g>\n");
    if style.show_rooms {
        out.push_str("<g class=\"rooms\" fill=\"#f5deb3\" fill-opacity=\"0.4\" stroke=\"#b8860b\">\n");
        for room in &trace.header.rooms {
            let pts: Vec<String> = room
                .polygon
                .iter()
                .map(|p| {
                    let (x, y) = c.px(DVec2::new(p[0], p[1]));
                    format!("{},{}", f(x), f(y))
                })
                .collect();
            writeln!(out, "<polygon points=\"{}\"/>", pts.join(" ")).unwrap();
        }
        out.push_str("</g>\n");
    }
    out
}

fn draw(trace: &Trace, grid: &OccupancyGrid, background: &str, view: &View, t: f64, style: &RenderStyle) -> String {
    let c = canvas(grid, style);
    let g = &grid.geometry;
    let (w, h) = (c.len(g.width as f64 * g.resolution), c.len(g.height as f64 * g.resolution));
    let mut out = String::new();
    writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">",
        f(w),
        f(h),
        f(w),
        f(h)
    )
    .unwrap();
    writeln!(out, "<rect class=\"floor\" width=\"{}\" height=\"{}\" fill=\"#fff\"/>", f(w), f(h)).unwrap();
    out.push_str(background);

    if style.show_queues {
        out.push_str("<g class=\"queues\">\n");
        for room in &trace.header.rooms {
            let occupants = view.queues.get(&room.location).map(Vec::as_slice).unwrap_or(&[]);
            for (k, s) in room.slots.iter().enumerate() {
                let (x, y) = c.px(DVec2::new(s[0], s[1]));
                let fill = occupants.get(k).map_or("none", |&r| style.color(r));
                writeln!(
                    out,
                    "<rect class=\"slot\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{fill}\" fill-opacity=\"0.5\" stroke=\"#888\"/>",
                    f(x - c.len(0.2)),
                    f(y - c.len(0.2)),
                    f(c.len(0.4)),
                    f(c.len(0.4))
                )
                .unwrap();
            }
        }
        out.push_str("</g>\n");
    }

    if style.show_paths {
        out.push_str("<g class=\"paths\" fill=\"none\" stroke-width=\"2\" stroke-opacity=\"0.6\">\n");
        for (robot, pts) in &view.paths {
            if pts.len() < 2 {
                continue;
            }
            let pts: Vec<String> = pts
                .iter()
                .map(|p| {
                    let (x, y) = c.px(DVec2::new(p[0], p[1]));
                    format!("{},{}", f(x), f(y))
                })
                .collect();
            writeln!(out, "<polyline stroke=\"{}\" points=\"{}\"/>", style.color(*robot), pts.join(" ")).unwrap();
        }
        out.push_str("</g>\n");
    }

    if style.show_obstacles {
        out.push_str("<g class=\"obstacles\" fill=\"#e75480\">\n");
        for pts in view.obstacles.values() {
            for p in pts {
                let (x, y) = c.px(DVec2::new(p[0], p[1]));
                writeln!(out, "<circle cx=\"{}\" cy=\"{}\" r=\"2\"/>", f(x), f(y)).unwrap();
            }
        }
        out.push_str("</g>\n");
    }

    if style.show_clusters {
        out.push_str("<g class=\"clusters\" stroke=\"#555\" stroke-dasharray=\"4 3\">\n");
        for cl in &view.clusters {
            let Some(lead) = view.robots.get(&cl.leader) else { continue };
            let (lx, ly) = c.px(DVec2::new(lead.x, lead.y));
            for m in cl.members.iter().filter(|&&m| m != cl.leader) {
                if let Some(p) = view.robots.get(m) {
                    let (x, y) = c.px(DVec2::new(p.x, p.y));
                    writeln!(out, "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>", f(lx), f(ly), f(x), f(y)).unwrap();
                }
            }
        }
        out.push_str("</g>\n");
    }

    if style.show_humans {
        out.push_str("<g class=\"humans\" fill=\"#999\">\n");
        for p in view.humans.values() {
            let (x, y) = c.px(*p);
            writeln!(out, "<circle cx=\"{}\" cy=\"{}\" r=\"{}\"/>", f(x), f(y), f(c.len(0.35))).unwrap();
        }
        out.push_str("</g>\n");
    }

    out.push_str("<g class=\"robots\">\n");
    let r = trace.header.r_robot;
    for (id, p) in &view.robots {
        let (x, y) = c.px(DVec2::new(p.x, p.y));
        let tip = DVec2::new(p.x, p.y) + DVec2::new(p.theta.cos(), p.theta.sin()) * r * 1.4;
        let (tx, ty) = c.px(tip);
        let color = style.color(*id);
        writeln!(out, "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{color}\"/>", f(x), f(y), f(c.len(r))).unwrap();
        writeln!(out, "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#000\" stroke-width=\"2\"/>", f(x), f(y), f(tx), f(ty))
            .unwrap();
    }
    out.push_str("</g>\n");
    writeln!(out, "<rect x=\"0\" y=\"0\" width=\"96\" height=\"18\" fill=\"white\" fill-opacity=\"0.8\"/>").unwrap();
    writeln!(out, "<text x=\"4\" y=\"14\" font-family=\"monospace\" font-size=\"12\">t = {:.2} s</text>", t).unwrap();
    out.push_str("</svg>\n");
    out
}
