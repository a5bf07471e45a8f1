//! Tree snapshot text format `ust-v1`.
//!
//! ```text
//! ust-v1 side=<n> bc=<wired|free> seed=<u64> margin=<f>
//! x y px py
//! ...
//! ```
//!
//! One line per vertex, `x y` the vertex and `px py` its parent; the root
//! repeats itself. Lines are emitted in vertex-id (row-major) order, so a
//! save is byte-deterministic and `save(load(s)) == s`.
//!
//! Under the wired boundary, edges incident to the identified boundary
//! class are written through their boundary crossing point: a parent on the
//! box boundary means "parent is the wired class, crossing there", and the
//! single line whose own coordinates lie on the box boundary is the class's
//! parent edge (or, for a class rooted tree, its self-line at a
//! representative point).

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{BoxGraph, WalkGraph};
use crate::lattice::{Boundary, GridBox, Point};
use crate::wilson::{SpanningTree, TreeMeta, NO_VERTEX};

/// Serializes a tree in `ust-v1` format.
pub fn save(tree: &SpanningTree) -> String {
    let mut out = String::new();
    let meta = tree.meta();
    let _ = writeln!(
        out,
        "ust-v1 side={} bc={} seed={} margin={}",
        tree.window_side(),
        tree.boundary().label(),
        meta.seed,
        meta.margin
    );
    let root = tree.root();
    let wired = tree.wired_vertex();
    for v in tree.vertices() {
        if Some(v) == wired {
            continue; // written last
        }
        let p = tree.point_of(v).expect("non-wired vertex has a point");
        let parent = tree.parent(v);
        let pp = if Some(parent) == wired {
            tree.wired_crossing(v).expect("wired edge has a crossing")
        } else if v == root {
            p
        } else {
            tree.point_of(parent).expect("interior parent")
        };
        let _ = writeln!(out, "{} {} {} {}", p.x, p.y, pp.x, pp.y);
    }
    if let Some(w) = wired {
        if tree.contains(w) {
            let c = tree.wired_crossing(w).expect("wired vertex has a representative");
            let pp = if w == root {
                c
            } else {
                tree.point_of(tree.parent(w)).expect("wired parent is interior")
            };
            let _ = writeln!(out, "{} {} {} {}", c.x, c.y, pp.x, pp.y);
        }
    }
    out
}

/// Parses a tree from `ust-v1` text. Malformed lines are rejected with
/// their line number; structural violations (two roots, parent cycles,
/// non-adjacent edges) are integrity errors.
pub fn load(text: &str) -> Result<SpanningTree> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Parse { line: 1, msg: "empty snapshot".into() })?;
    let (window_side, boundary, seed, margin) = parse_header(header)?;

    let mut rows: Vec<(usize, Point, Point)> = Vec::new();
    let mut box_side = window_side;
    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            return Err(Error::Parse { line: lineno, msg: "blank line".into() });
        }
        let mut it = line.split_ascii_whitespace();
        let mut next_i32 = |name: &str| -> Result<i32> {
            it.next()
                .ok_or_else(|| Error::Parse {
                    line: lineno,
                    msg: format!("missing field {name}"),
                })?
                .parse()
                .map_err(|_| Error::Parse {
                    line: lineno,
                    msg: format!("bad integer in field {name}"),
                })
        };
        let x = next_i32("x")?;
        let y = next_i32("y")?;
        let px = next_i32("px")?;
        let py = next_i32("py")?;
        if it.next().is_some() {
            return Err(Error::Parse { line: lineno, msg: "trailing tokens".into() });
        }
        let v = Point::new(x, y);
        let p = Point::new(px, py);
        box_side = box_side.max(v.linf()).max(p.linf());
        rows.push((lineno, v, p));
    }
    if rows.is_empty() {
        return Err(Error::Parse { line: 1, msg: "snapshot has no vertices".into() });
    }

    let grid = GridBox::new(box_side, boundary)?;
    let graph = BoxGraph::new(grid);
    let mut parent = vec![NO_VERTEX; graph.slot_count()];
    let mut wired_cross = HashMap::new();
    let mut root: Option<u32> = None;

    for &(lineno, v, p) in &rows {
        let vid = graph.id_of(v);
        let pid = graph.id_of(p);
        if parent[vid as usize] != NO_VERTEX {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("vertex ({}, {}) appears twice", v.x, v.y),
            });
        }
        if vid == pid && v != p {
            return Err(Error::Parse {
                line: lineno,
                msg: "edge joins two boundary points of the wired class".into(),
            });
        }
        if vid != pid && v.dist2(p) != 1 {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("({}, {}) and ({}, {}) are not lattice neighbors", v.x, v.y, p.x, p.y),
            });
        }
        parent[vid as usize] = pid;
        if vid == pid {
            if let Some(r) = root {
                let _ = r;
                return Err(Error::Integrity("snapshot declares two roots".into()));
            }
            root = Some(vid);
        }
        if Some(pid) == wired_id_of(&graph) && vid != pid {
            wired_cross.insert(vid, graph.raw_id(p));
        }
        if Some(vid) == wired_id_of(&graph) {
            wired_cross.insert(vid, graph.raw_id(v));
        }
    }
    let root = root.ok_or_else(|| Error::Integrity("snapshot has no root line".into()))?;

    SpanningTree::from_parts(
        graph,
        root,
        parent,
        wired_cross,
        window_side,
        TreeMeta { seed, margin },
    )
}

fn wired_id_of(graph: &BoxGraph) -> Option<u32> {
    match graph.boundary() {
        Boundary::Wired => Some(graph.wired_id()),
        Boundary::Free => None,
    }
}

fn parse_header(header: &str) -> Result<(i32, Boundary, u64, f64)> {
    let err = |msg: &str| Error::Parse { line: 1, msg: msg.into() };
    let mut it = header.split_ascii_whitespace();
    if it.next() != Some("ust-v1") {
        return Err(err("expected magic token 'ust-v1'"));
    }
    let mut side = None;
    let mut bc = None;
    let mut seed = None;
    let mut margin = None;
    for tok in it {
        let (key, value) = tok
            .split_once('=')
            .ok_or_else(|| err(&format!("bad header token '{tok}'")))?;
        match key {
            "side" => side = Some(value.parse::<i32>().map_err(|_| err("bad side"))?),
            "bc" => {
                bc = Some(match value {
                    "wired" => Boundary::Wired,
                    "free" => Boundary::Free,
                    _ => return Err(err("bc must be wired or free")),
                })
            }
            "seed" => seed = Some(value.parse::<u64>().map_err(|_| err("bad seed"))?),
            "margin" => margin = Some(value.parse::<f64>().map_err(|_| err("bad margin"))?),
            _ => return Err(err(&format!("unknown header key '{key}'"))),
        }
    }
    match (side, bc, seed, margin) {
        (Some(s), Some(b), Some(se), Some(m)) if s >= 0 => Ok((s, b, se, m)),
        _ => Err(err("header needs side, bc, seed, margin")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RandomSource;
    use crate::wilson::sample_ust;

    #[test]
    fn roundtrip_small_sampled_trees() {
        for seed in 0..5 {
            let mut rng = RandomSource::new(seed, 0);
            let t = sample_ust(4, 2.0, &mut rng).unwrap();
            let s = save(&t);
            let t2 = load(&s).unwrap();
            assert_eq!(save(&t2), s, "byte-exact round trip");
            assert_eq!(t2.root(), t.root());
            assert_eq!(t2.vertex_count(), t.vertex_count());
            let e1: Vec<_> = t.edges().collect();
            let e2: Vec<_> = t2.edges().collect();
            assert_eq!(e1, e2);
        }
    }

    #[test]
    fn truncated_file_is_parse_error() {
        let mut rng = RandomSource::new(1, 0);
        let t = sample_ust(3, 2.0, &mut rng).unwrap();
        let s = save(&t);
        let cut = &s[..s.len() - 3];
        match load(cut) {
            Err(Error::Parse { line, .. }) => assert!(line > 1),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn injected_cycle_is_named() {
        // Hand-written free-boundary snapshot with a 4-cycle off the root.
        let text = "ust-v1 side=2 bc=free seed=0 margin=1\n\
                    -2 -2 -2 -2\n\
                    0 0 1 0\n\
                    1 0 1 1\n\
                    1 1 0 1\n\
                    0 1 0 0\n";
        match load(text) {
            Err(Error::Integrity(msg)) => assert!(msg.contains("cycle"), "{msg}"),
            other => panic!("expected integrity error, got {other:?}"),
        }
    }

    #[test]
    fn header_errors() {
        assert!(load("").is_err());
        assert!(load("ust-v2 side=1 bc=free seed=0 margin=1\n0 0 0 0\n").is_err());
        assert!(load("ust-v1 side=1 bc=free margin=1\n0 0 0 0\n").is_err());
    }

    #[test]
    fn wired_root_tree_roundtrips() {
        use crate::lattice::GridBox;
        use crate::wilson::wilson;
        let grid = GridBox::new(3, Boundary::Wired).unwrap();
        let mut rng = RandomSource::new(4, 2);
        let graph = BoxGraph::new(grid);
        let t = wilson(grid, graph.wired_id(), None, &mut rng, 3, TreeMeta::default()).unwrap();
        let s = save(&t);
        let t2 = load(&s).unwrap();
        assert_eq!(save(&t2), s);
        assert_eq!(t2.root(), t2.wired_vertex().unwrap());
    }
}
