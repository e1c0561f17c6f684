use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::LandscapeGraph;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayoutOptions {
    /// 2, or 3 to append normalized fitness as the third coordinate.
    pub dims: usize,
    pub seed: u64,
    pub iterations: usize,
    /// Only edges with weight strictly above this attract.
    pub weight_threshold: u64,
}

impl Default for LayoutOptions {
    fn default() -> Self {
        LayoutOptions {
            dims: 2,
            seed: 0,
            iterations: 200,
            weight_threshold: 0,
        }
    }
}

/// Node id to coordinates in the unit square (plus fitness for 3-D).
pub type Layout = BTreeMap<String, Vec<f64>>;

const INITIAL_TEMPERATURE: f64 = 0.1;
const MIN_DISTANCE: f64 = 1e-9;

/// Fruchterman-Reingold placement: all pairs repel, retained edges attract
/// (unweighted). Coordinates are min-max scaled to [0, 1] per axis, 0.5 on a
/// degenerate axis.
pub fn layout(g: &LandscapeGraph, opts: &LayoutOptions) -> Layout {
    assert!(opts.dims == 2 || opts.dims == 3, "dims must be 2 or 3");
    let shown = g.filtered(opts.weight_threshold);
    let ids: Vec<&str> = shown.nodes.keys().map(String::as_str).collect();
    let index: std::collections::HashMap<&str, usize> =
        ids.iter().enumerate().map(|(i, id)| (*id, i)).collect();
    let edges: Vec<(usize, usize)> = shown
        .edges
        .keys()
        .map(|(a, b)| (index[a.as_str()], index[b.as_str()]))
        .collect();
    let mut pos = force_directed(ids.len(), &edges, opts.seed, opts.iterations);
    normalize(&mut pos);

    let fitness = g.normalized_fitness();
    ids.iter()
        .zip(pos)
        .map(|(id, p)| {
            let mut coords = p.to_vec();
            if opts.dims == 3 {
                // Never-feasible nodes sit at the worst end.
                coords.push(fitness.get(*id).copied().unwrap_or(1.0));
            }
            (id.to_string(), coords)
        })
        .collect()
}

fn normalize(points: &mut [[f64; 2]]) {
    for axis in 0..2 {
        let lo = points.iter().map(|p| p[axis]).fold(f64::INFINITY, f64::min);
        let hi = points
            .iter()
            .map(|p| p[axis])
            .fold(f64::NEG_INFINITY, f64::max);
        for p in points.iter_mut() {
            p[axis] = if hi > lo {
                (p[axis] - lo) / (hi - lo)
            } else {
                0.5
            };
        }
    }
}

fn force_directed(
    n: usize,
    edges: &[(usize, usize)],
    seed: u64,
    iterations: usize,
) -> Vec<[f64; 2]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pos: Vec<[f64; 2]> = (0..n).map(|_| [rng.random(), rng.random()]).collect();
    if n < 2 {
        return pos;
    }
    let k = (1.0 / n as f64).sqrt();
    let k2 = k * k;
    let mut disp = vec![[0.0f64; 2]; n];
    for step in 0..iterations {
        let temperature = INITIAL_TEMPERATURE * (1.0 - step as f64 / iterations as f64);
        disp.iter_mut().for_each(|d| *d = [0.0, 0.0]);
        for i in 0..n {
            for j in i + 1..n {
                let dx = pos[i][0] - pos[j][0];
                let dy = pos[i][1] - pos[j][1];
                let dist = dx.hypot(dy).max(MIN_DISTANCE);
                let force = k2 / dist;
                let (fx, fy) = (dx / dist * force, dy / dist * force);
                disp[i][0] += fx;
                disp[i][1] += fy;
                disp[j][0] -= fx;
                disp[j][1] -= fy;
            }
        }
        for &(i, j) in edges {
            let dx = pos[i][0] - pos[j][0];
            let dy = pos[i][1] - pos[j][1];
            let dist = dx.hypot(dy).max(MIN_DISTANCE);
            let force = dist * dist / k;
            let (fx, fy) = (dx / dist * force, dy / dist * force);
            disp[i][0] -= fx;
            disp[i][1] -= fy;
            disp[j][0] += fx;
            disp[j][1] += fy;
        }
        for (p, d) in pos.iter_mut().zip(&disp) {
            let len = d[0].hypot(d[1]);
            if len > 0.0 {
                let step = len.min(temperature);
                p[0] += d[0] / len * step;
                p[1] += d[1] / len * step;
            }
        }
    }
    pos
}
