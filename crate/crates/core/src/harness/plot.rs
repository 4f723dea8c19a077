//! SVG rendering of verified solutions.

use std::fmt::Write;

use crate::graph::{Graph, Instance};
use crate::harness::verify::{verify_solution, Violation};
use crate::solution::SolutionFile;

const CELL: usize = 20;
const PALETTE: [&str; 10] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f",
];

fn center(row: usize, col: usize) -> (usize, usize) {
    (col * CELL + CELL / 2, row * CELL + CELL / 2)
}

/// Renders the map, each agent's path, start and goals.
///
/// Refuses to draw a solution that fails [`verify_solution`]. Output depends
/// only on the inputs.
pub fn emit_plot(graph: &Graph, instance: &Instance, solution: &SolutionFile) -> Result<String, Violation> {
    verify_solution(graph, instance, solution)?;
    let (w, h) = (graph.width() * CELL, graph.height() * CELL);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(s, r##"<rect x="0" y="0" width="{w}" height="{h}" fill="#ffffff"/>"##);
    for r in 0..graph.height() {
        for c in 0..graph.width() {
            if !graph.is_passable(r, c) {
                let _ = writeln!(
                    s,
                    r##"<rect x="{}" y="{}" width="{CELL}" height="{CELL}" fill="#404040"/>"##,
                    c * CELL,
                    r * CELL
                );
            }
        }
    }
    for (agent, (path, task)) in solution.paths.iter().zip(&instance.agents).enumerate() {
        let color = PALETTE[agent % PALETTE.len()];
        let points: Vec<String> = path
            .iter()
            .map(|&[r, c]| {
                let (x, y) = center(r, c);
                format!("{x},{y}")
            })
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="3" stroke-opacity="0.7"/>"#,
            points.join(" ")
        );
        let (sr, sc) = graph.coord(task.start);
        let (x, y) = center(sr, sc);
        let _ = writeln!(s, r#"<circle cx="{x}" cy="{y}" r="6" fill="{color}"/>"#);
        for (i, &g) in task.goals.iter().enumerate() {
            let (gr, gc) = graph.coord(g);
            let (x, y) = center(gr, gc);
            let _ = writeln!(
                s,
                r#"<rect x="{}" y="{}" width="12" height="12" fill="none" stroke="{color}" stroke-width="2"/>"#,
                x - 6,
                y - 6
            );
            let _ = writeln!(
                s,
                r#"<text x="{x}" y="{}" font-size="8" text-anchor="middle" fill="{color}">{agent}.{i}</text>"#,
                y + 3
            );
        }
    }
    s.push_str("</svg>\n");
    Ok(s)
}
