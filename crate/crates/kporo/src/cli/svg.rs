//! Minimal SVG dump of 2D covering scenes.

use crate::covering::CoverResult;
use crate::geometry::Point;
use crate::setgen::SparseGrid;
use std::fmt::Write;

const SIZE: f64 = 1000.0;

fn sx(v: f64) -> f64 {
    v * SIZE
}

// SVG y grows downward; flip so the unit square renders upright
fn sy(v: f64) -> f64 {
    (1.0 - v) * SIZE
}

pub fn render_cover_scene(grid: &SparseGrid, x: &Point, r: f64, cover: &CoverResult) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {SIZE} {SIZE}\">"
    );
    let _ = writeln!(out, "<rect width=\"{SIZE}\" height=\"{SIZE}\" fill=\"white\"/>");

    // occupied cells
    let cell = SIZE / grid.cells_per_axis() as f64;
    for c in grid.iter_cells() {
        let px = c[0] as f64 * cell;
        let py = SIZE - (c[1] + 1) as f64 * cell;
        let _ = writeln!(
            out,
            "<rect x=\"{px:.2}\" y=\"{py:.2}\" width=\"{cell:.2}\" height=\"{cell:.2}\" fill=\"#555\"/>"
        );
    }

    // working ball
    let _ = writeln!(
        out,
        "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"{:.2}\" fill=\"none\" stroke=\"#07f\" stroke-width=\"2\"/>",
        sx(x.coords()[0]),
        sy(x.coords()[1]),
        r * SIZE
    );

    // half-space boundaries (lines through anchors, perpendicular to normals)
    for (anchor, dir) in &cover.body_constraints {
        let (tx, ty) = (-dir[1], dir[0]);
        let _ = writeln!(
            out,
            "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#0a0\" stroke-width=\"0.5\" opacity=\"0.35\"/>",
            sx(anchor[0] - 2.0 * tx),
            sy(anchor[1] - 2.0 * ty),
            sx(anchor[0] + 2.0 * tx),
            sy(anchor[1] + 2.0 * ty)
        );
    }

    // covering balls: proof-path first, fallbacks tinted red
    for (i, ball) in cover.balls.iter().enumerate() {
        let fallback = i >= cover.proof_path_count;
        let color = if fallback { "#d33" } else { "#f90" };
        let _ = writeln!(
            out,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"{:.2}\" fill=\"{color}\" opacity=\"0.35\" stroke=\"{color}\"/>",
            sx(ball.center[0]),
            sy(ball.center[1]),
            ball.radius * SIZE
        );
    }

    out.push_str("</svg>\n");
    out
}
