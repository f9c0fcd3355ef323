//! Top-down trajectory plots as SVG.
//!
//! Each trajectory is coloured by time, red at its first pose and blue at
//! its last. The plot keeps one colour per vertex; the SVG approximates that
//! with a few gradient-stroked polyline pieces per trajectory.

use std::fmt::Write as _;

use crate::env::render::base_shade;
use crate::env::{AgentPose, Cell, LabyrinthMap, CELL_SIZE};

/// Gradient pieces drawn per trajectory.
pub const PIECES_PER_PATH: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rgb(pub u8, pub u8, pub u8);

impl Rgb {
    fn hex(self) -> String {
        format!("#{:02x}{:02x}{:02x}", self.0, self.1, self.2)
    }
}

/// Colour of vertex `i` of `n`: pure red first, pure blue last.
pub fn time_colour(i: usize, n: usize) -> Rgb {
    let t = if n <= 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
    Rgb((255.0 * (1.0 - t)).round() as u8, 0, (255.0 * t).round() as u8)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlotPath {
    pub points: Vec<(f64, f64)>,
    pub colours: Vec<Rgb>,
}

impl PlotPath {
    pub fn new(points: Vec<(f64, f64)>) -> Self {
        let n = points.len();
        let colours = (0..n).map(|i| time_colour(i, n)).collect();
        PlotPath { points, colours }
    }

    pub fn segments(&self) -> usize {
        self.points.len().saturating_sub(1)
    }
}

#[derive(Clone, Debug)]
pub struct TrajectoryPlot<'a> {
    map: &'a LabyrinthMap,
    pub title: String,
    pub paths: Vec<PlotPath>,
    pub scale: f64,
}

impl<'a> TrajectoryPlot<'a> {
    pub fn new(map: &'a LabyrinthMap) -> Self {
        TrajectoryPlot {
            map,
            title: String::new(),
            paths: Vec::new(),
            scale: 0.75,
        }
    }

    pub fn add_trajectory(&mut self, poses: &[AgentPose]) {
        self.add_points(poses.iter().map(|p| (p.x, p.y)).collect());
    }

    pub fn add_points(&mut self, points: Vec<(f64, f64)>) {
        if !points.is_empty() {
            self.paths.push(PlotPath::new(points));
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.paths.iter().map(|p| p.points.len()).sum()
    }

    pub fn to_svg(&self) -> String {
        let (w, h) = self.map.world_size();
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{:.0}" viewBox="0 0 {w} {h}">"#,
            w * self.scale,
            h * self.scale
        );
        if !self.title.is_empty() {
            let _ = writeln!(out, "<title>{}</title>", escape(&self.title));
        }
        let _ = writeln!(out, r##"<rect x="0" y="0" width="{w}" height="{h}" fill="#ffffff"/>"##);
        self.write_map(&mut out);

        let mut defs = String::new();
        let mut body = String::new();
        for (k, path) in self.paths.iter().enumerate() {
            write_path(k, path, &mut defs, &mut body);
        }
        if !defs.is_empty() {
            let _ = writeln!(out, "<defs>\n{defs}</defs>");
        }
        let _ = writeln!(
            out,
            r#"<g fill="none" stroke-width="1.5" stroke-linecap="round" stroke-linejoin="round">"#
        );
        out.push_str(&body);
        out.push_str("</g>\n");
        for path in &self.paths {
            let (x, y) = path.points[0];
            let _ = writeln!(out, r##"<circle cx="{x:.1}" cy="{y:.1}" r="3" fill="#000000"/>"##);
        }
        out.push_str("</svg>\n");
        out
    }

    fn write_map(&self, out: &mut String) {
        let map = self.map;
        out.push_str("<g stroke=\"none\">\n");
        for y in 0..map.height() as i64 {
            for x in 0..map.width() as i64 {
                let Cell::Wall(s) = map.cell(x, y) else { continue };
                let near_floor = (-1..=1)
                    .flat_map(|dy| (-1..=1).map(move |dx| (dx, dy)))
                    .any(|(dx, dy)| !map.is_wall(x + dx, y + dy));
                if !near_floor {
                    continue;
                }
                let g = (255.0 * (1.0 - 0.8 * base_shade(s))).round() as u8;
                let _ = writeln!(
                    out,
                    r#"<rect x="{}" y="{}" width="{CELL_SIZE}" height="{CELL_SIZE}" fill="{}"/>"#,
                    x as f64 * CELL_SIZE,
                    y as f64 * CELL_SIZE,
                    Rgb(g, g, g).hex()
                );
            }
        }
        for &(x, y) in map.goal_cells() {
            let _ = writeln!(
                out,
                r##"<rect x="{}" y="{}" width="{CELL_SIZE}" height="{CELL_SIZE}" fill="#7fd67f"/>"##,
                x as f64 * CELL_SIZE,
                y as f64 * CELL_SIZE
            );
        }
        if let Some((vx, vy)) = map.vest() {
            let _ = writeln!(
                out,
                r##"<circle cx="{vx}" cy="{vy}" r="{}" fill="none" stroke="#1a8c1a" stroke-width="2"/>"##,
                CELL_SIZE
            );
        }
        out.push_str("</g>\n<g font-family=\"sans-serif\" font-size=\"20\" fill=\"#888888\" text-anchor=\"middle\">\n");
        for r in map.spawn_regions() {
            let _ = writeln!(out, r#"<text x="{:.0}" y="{:.0}">{}</text>"#, r.centre.0, r.centre.1 + 7.0, r.label);
        }
        out.push_str("</g>\n");
    }
}

fn write_path(k: usize, path: &PlotPath, defs: &mut String, body: &mut String) {
    let n = path.points.len();
    if n == 1 {
        return;
    }
    let pieces = PIECES_PER_PATH.min(n - 1);
    for j in 0..pieces {
        let s = j * (n - 1) / pieces;
        let e = (j + 1) * (n - 1) / pieces;
        let (a, b) = (path.points[s], path.points[e]);
        let stroke = if a == b {
            path.colours[(s + e) / 2].hex()
        } else {
            let id = format!("g{k}_{j}");
            let _ = writeln!(
                defs,
                r#"<linearGradient id="{id}" gradientUnits="userSpaceOnUse" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"><stop offset="0" stop-color="{}"/><stop offset="1" stop-color="{}"/></linearGradient>"#,
                a.0,
                a.1,
                b.0,
                b.1,
                path.colours[s].hex(),
                path.colours[e].hex()
            );
            format!("url(#{id})")
        };
        body.push_str("<polyline points=\"");
        let mut last = None;
        for &p in &path.points[s..=e] {
            if last != Some(p) {
                let _ = write!(body, "{:.1},{:.1} ", p.0, p.1);
                last = Some(p);
            }
        }
        if last == Some(a) {
            // a stationary piece still needs two points to draw its dot
            let _ = write!(body, "{:.1},{:.1} ", a.0, a.1);
        }
        let _ = writeln!(body, "\" stroke=\"{stroke}\"/>");
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// One line per pose: episode, step index, position and heading.
pub fn trajectories_csv(trajectories: &[Vec<AgentPose>]) -> String {
    let mut out = String::from("episode,t,x,y,heading\n");
    for (e, poses) in trajectories.iter().enumerate() {
        for (t, p) in poses.iter().enumerate() {
            let _ = writeln!(out, "{e},{t},{:.4},{:.4},{:.6}", p.x, p.y, p.heading);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn colours_run_red_to_blue() {
        assert_eq!(time_colour(0, 2), Rgb(255, 0, 0));
        assert_eq!(time_colour(1, 2), Rgb(0, 0, 255));
        assert_eq!(time_colour(0, 1), Rgb(255, 0, 0));
        assert_eq!(time_colour(50, 101), Rgb(128, 0, 128));
    }

    #[test]
    fn two_point_path_is_one_gradient_segment() {
        let map = LabyrinthMap::my_way_home();
        let mut plot = TrajectoryPlot::new(&map);
        plot.add_points(vec![(100.0, 100.0), (120.0, 100.0)]);
        assert_eq!(plot.paths[0].segments(), 1);
        assert_eq!(plot.vertex_count(), 2);
        let svg = plot.to_svg();
        assert_eq!(svg.matches("<linearGradient").count(), 1);
        assert!(svg.contains(r##"<stop offset="0" stop-color="#ff0000"/><stop offset="1" stop-color="#0000ff"/>"##));
        assert_eq!(svg.matches("<polyline").count(), 1);
    }

    #[test]
    fn vertex_count_is_sum_of_lengths() {
        let map = LabyrinthMap::my_way_home();
        let mut plot = TrajectoryPlot::new(&map);
        let a: Vec<AgentPose> = (0..10).map(|i| AgentPose::new(100.0 + i as f64, 50.0, 0.0)).collect();
        let b: Vec<AgentPose> = (0..2101).map(|i| AgentPose::new(300.0, 50.0 + (i % 7) as f64, 0.0)).collect();
        plot.add_trajectory(&a);
        plot.add_trajectory(&b);
        assert_eq!(plot.vertex_count(), 2111);
        let svg = plot.to_svg();
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 9 + PIECES_PER_PATH);
    }

    #[test]
    fn empty_plot_draws_only_the_map() {
        let map = LabyrinthMap::my_way_home();
        let svg = TrajectoryPlot::new(&map).to_svg();
        assert!(!svg.contains("<polyline"));
        assert!(svg.contains("<rect"));
        assert_eq!(svg.matches("<text").count(), 17);
    }

    #[test]
    fn csv_has_a_row_per_pose() {
        let t = vec![vec![AgentPose::new(1.0, 2.0, 3.0); 4], vec![AgentPose::new(1.0, 2.0, 3.0); 2]];
        assert_eq!(trajectories_csv(&t).lines().count(), 7);
    }
}
