//! Columnar interchange format for loops.
//!
//! One header line, then one row per lattice time:
//!
//! ```text
//! # N=240 T=6.283185307179586 n=3 masses=1 1 1
//! 0 x1 y1 x2 y2 x3 y3
//! ...
//! ```
//!
//! Floats are written in Rust's shortest round-trip form, so files are
//! bit-reproducible for identical inputs.

use super::{DiscreteLoop, LoopError};
use crate::lagrangian::{Configuration, MassVector};
use crate::planar::Vec2;
use std::io::{BufRead, Write};

pub fn write_loop<W: Write>(
    mut w: W,
    lp: &DiscreteLoop,
    masses: &MassVector,
) -> Result<(), LoopError> {
    let err = |e: std::io::Error| LoopError::Io(e.to_string());
    let masses_str: Vec<String> = masses.iter().map(|m| format!("{m}")).collect();
    writeln!(
        w,
        "# N={} T={} n={} masses={}",
        lp.n_nodes(),
        lp.period(),
        lp.n_bodies(),
        masses_str.join(" ")
    )
    .map_err(err)?;
    let dt = lp.dt();
    for (j, node) in lp.nodes().iter().enumerate() {
        let mut row = format!("{}", j as f64 * dt);
        for p in &node.positions {
            row.push_str(&format!(" {} {}", p.x, p.y));
        }
        writeln!(w, "{row}").map_err(err)?;
    }
    Ok(())
}

pub fn read_loop<R: BufRead>(r: R) -> Result<(DiscreteLoop, MassVector), LoopError> {
    let bad = |msg: &str| LoopError::Io(msg.to_string());
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| bad("empty file"))?
        .map_err(|e| LoopError::Io(e.to_string()))?;
    let header = header
        .strip_prefix('#')
        .ok_or_else(|| bad("missing '#' header line"))?
        .trim();
    let mut n_nodes = None;
    let mut period = None;
    let mut n_bodies = None;
    let mut masses: Vec<f64> = Vec::new();
    let mut tokens = header.split_whitespace().peekable();
    while let Some(tok) = tokens.next() {
        if let Some(v) = tok.strip_prefix("N=") {
            n_nodes = Some(v.parse::<usize>().map_err(|_| bad("bad N"))?);
        } else if let Some(v) = tok.strip_prefix("T=") {
            period = Some(v.parse::<f64>().map_err(|_| bad("bad T"))?);
        } else if let Some(v) = tok.strip_prefix("n=") {
            n_bodies = Some(v.parse::<usize>().map_err(|_| bad("bad n"))?);
        } else if let Some(v) = tok.strip_prefix("masses=") {
            masses.push(v.parse::<f64>().map_err(|_| bad("bad mass"))?);
            while let Some(next) = tokens.peek() {
                if let Ok(m) = next.parse::<f64>() {
                    masses.push(m);
                    tokens.next();
                } else {
                    break;
                }
            }
        }
    }
    let n_nodes = n_nodes.ok_or_else(|| bad("header missing N"))?;
    let period = period.ok_or_else(|| bad("header missing T"))?;
    let n_bodies = n_bodies.ok_or_else(|| bad("header missing n"))?;
    if masses.len() != n_bodies {
        return Err(bad("header mass count does not match n"));
    }
    let masses = MassVector::new(masses).map_err(|e| LoopError::Io(e.to_string()))?;
    let mut nodes = Vec::with_capacity(n_nodes);
    for line in lines {
        let line = line.map_err(|e| LoopError::Io(e.to_string()))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<f64> = line
            .split_whitespace()
            .map(|s| s.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| bad("non-numeric column"))?;
        if cols.len() != 1 + 2 * n_bodies {
            return Err(bad("wrong column count"));
        }
        let positions = (0..n_bodies)
            .map(|i| Vec2::new(cols[1 + 2 * i], cols[2 + 2 * i]))
            .collect();
        nodes.push(Configuration::new(positions));
    }
    if nodes.len() != n_nodes {
        return Err(bad("row count does not match header N"));
    }
    Ok((DiscreteLoop::new(nodes, period)?, masses))
}
