//! Maps bundled with the crate.
//!
//! `maze-32-32-4` is a seeded 32x32 maze with 4-wide corridors. The two
//! `crowded` maps are 8x8 layouts with many obstacles, where agents cannot
//! easily step aside for each other.

use crate::graph::{parse_map, Graph};

pub const MAZE_32_32_4: &str = include_str!("../maps/maze-32-32-4.map");
pub const CROWDED_A: &str = include_str!("../maps/crowded-a.map");
pub const CROWDED_B: &str = include_str!("../maps/crowded-b.map");

/// `(name, map text)` for every bundled map.
pub const BUILTIN: [(&str, &str); 3] = [
    ("maze-32-32-4", MAZE_32_32_4),
    ("crowded-a", CROWDED_A),
    ("crowded-b", CROWDED_B),
];

/// Looks a bundled map up by name and parses it.
pub fn builtin(name: &str) -> Option<Graph> {
    BUILTIN
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| parse_map(text).expect("bundled maps are well-formed"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_maps_parse_and_are_connected() {
        for (name, _) in BUILTIN {
            let g = builtin(name).unwrap();
            let d = g.bfs_distances(0);
            assert!(d.iter().all(Option::is_some), "{name} is disconnected");
        }
    }
}
