//! Static SVG rendering of maps, abstractions, and paths.
//!
//! Grid coordinates put y up; SVG puts y down, so everything is flipped
//! vertically. Cells are shaded by occupancy (white free, black occupied),
//! abstraction leaves outlined, tolerance-violating leaves tinted red, and
//! paths drawn as polylines through cell centers.

use std::fmt::Write as _;
use std::path::Path as FsPath;

use crate::error::Result;
use crate::grid::GridMap;
use crate::planner::{is_eps_obstacle, Path, ValueCache};
use crate::tree::{QuadTree, TreeAbstraction};

const CELL_PX: f64 = 8.0;
const PATH_COLORS: [&str; 4] = ["#1f6fd0", "#e07b1f", "#2a9d5c", "#8a4fbf"];

/// Render the map with an abstraction overlay and zero or more paths.
///
/// The obstacle tint follows the planner's node predicate when a value
/// cache is supplied; without one only shading and borders are drawn.
pub fn render_svg(
    map: &GridMap,
    tree: &QuadTree,
    abs: &TreeAbstraction,
    values: Option<&ValueCache>,
    paths: &[&Path],
    out: &FsPath,
) -> Result<()> {
    let side = map.side();
    let px = side as f64 * CELL_PX;
    let flip = |y: f64| (side as f64 - y) * CELL_PX;

    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{px}" height="{px}" viewBox="0 0 {px} {px}">"#
    )
    .expect("write to string");
    writeln!(svg, r#"<rect width="{px}" height="{px}" fill="white"/>"#).expect("write to string");

    // Unit-cell shading; fully free cells stay background white.
    for y in 0..side {
        for x in 0..side {
            let p = map.occupancy(x, y);
            if p <= 0.0 {
                continue;
            }
            let level = (255.0 * (1.0 - p)).round() as u8;
            writeln!(
                svg,
                r#"<rect x="{}" y="{}" width="{CELL_PX}" height="{CELL_PX}" fill="rgb({level},{level},{level})"/>"#,
                x as f64 * CELL_PX,
                flip(y as f64 + 1.0),
            )
            .expect("write to string");
        }
    }

    // Obstacle tint under the borders.
    if let Some(values) = values {
        for &leaf in abs.leaves() {
            if is_eps_obstacle(tree, map, values, leaf)? {
                let (ox, oy) = tree.origin(leaf);
                let span = 1usize << tree.r_value(leaf);
                writeln!(
                    svg,
                    r#"<rect x="{}" y="{}" width="{}" height="{}" fill="rgba(220,40,40,0.35)"/>"#,
                    ox as f64 * CELL_PX,
                    flip((oy as usize + span) as f64),
                    span as f64 * CELL_PX,
                    span as f64 * CELL_PX,
                )
                .expect("write to string");
            }
        }
    }

    // Abstraction cell borders.
    for &leaf in abs.leaves() {
        let (ox, oy) = tree.origin(leaf);
        let span = 1usize << tree.r_value(leaf);
        writeln!(
            svg,
            r##"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#444" stroke-width="0.8"/>"##,
            ox as f64 * CELL_PX,
            flip((oy as usize + span) as f64),
            span as f64 * CELL_PX,
            span as f64 * CELL_PX,
        )
        .expect("write to string");
    }

    for (i, path) in paths.iter().enumerate() {
        let color = PATH_COLORS[i % PATH_COLORS.len()];
        let points: Vec<String> = path
            .nodes
            .iter()
            .map(|&n| {
                let (cx, cy) = tree.center(n);
                format!("{},{}", cx * CELL_PX, flip(cy))
            })
            .collect();
        writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2.5" stroke-linejoin="round"/>"#,
            points.join(" ")
        )
        .expect("write to string");
        if let Some(&first) = path.nodes.first() {
            let (cx, cy) = tree.center(first);
            writeln!(
                svg,
                r#"<circle cx="{}" cy="{}" r="3" fill="{color}"/>"#,
                cx * CELL_PX,
                flip(cy)
            )
            .expect("write to string");
        }
    }

    writeln!(svg, "</svg>").expect("write to string");
    std::fs::write(out, svg)?;
    Ok(())
}
