//! Discretization of the rotationally symmetric model surfaces and
//! Gromov-Hausdorff upper bounds via correspondence distortion.
//!
//! Distances on a profile sphere dtheta^2 + R(theta)^2 dalpha^2 are computed
//! on a grid graph (8-neighbor stencil plus long-range chords), refined by a
//! midpoint-insertion shortening pass on each extracted path, then closed
//! under the triangle inequality with a min-plus sweep. Rotational symmetry
//! collapses the all-pairs problem to a (theta, theta, angle-offset) table,
//! so only one source column of shortest-path trees is ever run.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::profile::ProfileFunction;
use crate::tol;

/// Finite metric space: labeled points plus a symmetric distance matrix with
/// zero diagonal satisfying the triangle inequality.
#[derive(Clone, Debug)]
pub struct DiscreteMetricSpace {
    labels: Vec<String>,
    dist: Vec<f64>,
    n: usize,
}

impl DiscreteMetricSpace {
    /// Validates and wraps a distance matrix. Triangle inequality is checked
    /// exhaustively for n <= 512 and on one million sampled triples above.
    pub fn new(labels: Vec<String>, dist: Vec<f64>) -> Result<Self> {
        let n = labels.len();
        if dist.len() != n * n {
            return Err(Error::InvalidDistanceMatrix {
                detail: format!("matrix length {} for {} points", dist.len(), n),
            });
        }
        let space = Self { labels, dist, n };
        space.validate()?;
        Ok(space)
    }

    fn validate(&self) -> Result<()> {
        let n = self.n;
        for i in 0..n {
            if self.distance(i, i) != 0.0 {
                return Err(Error::InvalidDistanceMatrix {
                    detail: format!("nonzero diagonal at {i}"),
                });
            }
            for j in (i + 1)..n {
                let (a, b) = (self.distance(i, j), self.distance(j, i));
                if a != b {
                    return Err(Error::InvalidDistanceMatrix {
                        detail: format!("asymmetry at ({i},{j}): {a} vs {b}"),
                    });
                }
                if !a.is_finite() || a < 0.0 {
                    return Err(Error::InvalidDistanceMatrix {
                        detail: format!("invalid entry {a} at ({i},{j})"),
                    });
                }
            }
        }
        let worst = self.triangle_violation();
        if worst > tol::TRIANGLE {
            return Err(Error::InvalidDistanceMatrix {
                detail: format!("triangle inequality violated by {worst:.3e}"),
            });
        }
        Ok(())
    }

    /// Worst triangle-inequality violation found (exhaustive for n <= 512,
    /// sampled for larger spaces).
    pub fn triangle_violation(&self) -> f64 {
        let n = self.n;
        if n <= 512 {
            (0..n)
                .into_par_iter()
                .map(|i| {
                    let mut worst: f64 = 0.0;
                    for j in 0..n {
                        let dij = self.distance(i, j);
                        for k in 0..n {
                            let v = self.distance(i, k) - dij - self.distance(j, k);
                            worst = worst.max(v);
                        }
                    }
                    worst
                })
                .reduce(|| 0.0, f64::max)
        } else {
            // Deterministic sampled triples.
            let mut state = 0x9e3779b97f4a7c15u64;
            let mut next = move || {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                state
            };
            let mut worst: f64 = 0.0;
            for _ in 0..1_000_000 {
                let i = (next() % self.n as u64) as usize;
                let j = (next() % self.n as u64) as usize;
                let k = (next() % self.n as u64) as usize;
                let v = self.distance(i, k) - self.distance(i, j) - self.distance(j, k);
                worst = worst.max(v);
            }
            worst
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }

    pub fn diameter(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }

    /// Index of a labeled point.
    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Uniformly scaled copy (distances multiplied by c > 0).
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            labels: self.labels.clone(),
            dist: self.dist.iter().map(|d| c * d).collect(),
            n: self.n,
        }
    }
}

/// Grid specification for [`surface_distances`].
#[derive(Clone, Copy, Debug)]
pub struct SurfaceGrid {
    /// Interior latitude rows of the computation graph.
    pub n_theta: usize,
    /// Angular columns of the computation graph.
    pub n_alpha: usize,
    /// Keep every k-th row/column as a point of the output space.
    pub subsample: usize,
    /// Run the midpoint-insertion shortening pass on extracted paths.
    pub refine: bool,
}

impl SurfaceGrid {
    pub fn new(n: usize) -> Self {
        Self {
            n_theta: n,
            n_alpha: n,
            subsample: (n / 16).max(1),
            refine: true,
        }
    }
}

struct SurfaceGraph<'a> {
    profile: &'a ProfileFunction,
    thetas: Vec<f64>,
    n_theta: usize,
    n_alpha: usize,
    d_alpha: f64,
    tip_lo: f64,
    tip_hi: f64,
}

#[derive(PartialEq)]
struct HeapItem {
    cost: f64,
    node: usize,
}

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .partial_cmp(&self.cost)
            .unwrap_or(Ordering::Equal)
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<'a> SurfaceGraph<'a> {
    fn new(profile: &'a ProfileFunction, n_theta: usize, n_alpha: usize) -> Self {
        let (lo, hi) = profile.domain();
        let thetas = crate::numerics::interior_grid(lo, hi, n_theta);
        Self {
            profile,
            thetas,
            n_theta,
            n_alpha,
            d_alpha: 2.0 * std::f64::consts::PI / n_alpha as f64,
            tip_lo: lo,
            tip_hi: hi,
        }
    }

    fn node(&self, i: usize, j: usize) -> usize {
        i * self.n_alpha + j
    }

    /// Total nodes: grid plus the two tips appended at the end.
    fn node_count(&self) -> usize {
        self.n_theta * self.n_alpha + 2
    }

    fn tip_lo_node(&self) -> usize {
        self.n_theta * self.n_alpha
    }

    fn tip_hi_node(&self) -> usize {
        self.n_theta * self.n_alpha + 1
    }

    fn coords(&self, node: usize) -> (f64, f64) {
        if node == self.tip_lo_node() {
            (self.tip_lo, 0.0)
        } else if node == self.tip_hi_node() {
            (self.tip_hi, 0.0)
        } else {
            let i = node / self.n_alpha;
            let j = node % self.n_alpha;
            (self.thetas[i], j as f64 * self.d_alpha)
        }
    }

    /// Length of the straight chart segment from a to b under the profile
    /// metric, by 5-node quadrature of the line element.
    fn segment_length(&self, a: (f64, f64), b: (f64, f64)) -> f64 {
        let dth = b.0 - a.0;
        let mut dal = b.1 - a.1;
        // Shortest angular representative.
        let two_pi = 2.0 * std::f64::consts::PI;
        if dal > std::f64::consts::PI {
            dal -= two_pi;
        } else if dal < -std::f64::consts::PI {
            dal += two_pi;
        }
        const NODES: [f64; 5] = [
            0.046910077030668,
            0.230765344947158,
            0.5,
            0.769234655052842,
            0.953089922969332,
        ];
        const WEIGHTS: [f64; 5] = [
            0.118463442528095,
            0.239314335249683,
            0.284444444444444,
            0.239314335249683,
            0.118463442528095,
        ];
        let mut acc = 0.0;
        for (u, w) in NODES.iter().zip(WEIGHTS.iter()) {
            let th = a.0 + u * dth;
            let r = self.profile.eval(th);
            acc += w * (dth * dth + r * r * dal * dal).sqrt();
        }
        acc
    }

    fn neighbors(&self, node: usize) -> Vec<(usize, f64)> {
        let mut out = Vec::with_capacity(26);
        if node == self.tip_lo_node() {
            // Radial spokes to the first ring; the radial coordinate is arc
            // length, so the distance is exact.
            for j in 0..self.n_alpha {
                out.push((self.node(0, j), self.thetas[0] - self.tip_lo));
            }
            out.push((self.tip_hi_node(), self.tip_hi - self.tip_lo));
            return out;
        }
        if node == self.tip_hi_node() {
            for j in 0..self.n_alpha {
                out.push((
                    self.node(self.n_theta - 1, j),
                    self.tip_hi - self.thetas[self.n_theta - 1],
                ));
            }
            out.push((self.tip_lo_node(), self.tip_hi - self.tip_lo));
            return out;
        }
        let i = node / self.n_alpha;
        let j = node % self.n_alpha;
        let here = self.coords(node);
        // 8-neighbor stencil plus 16 long-range chords.
        const OFFSETS: [(i64, i64); 24] = [
            (1, 0),
            (-1, 0),
            (0, 1),
            (0, -1),
            (1, 1),
            (1, -1),
            (-1, 1),
            (-1, -1),
            (1, 2),
            (1, -2),
            (-1, 2),
            (-1, -2),
            (2, 1),
            (2, -1),
            (-2, 1),
            (-2, -1),
            (1, 3),
            (1, -3),
            (-1, 3),
            (-1, -3),
            (3, 1),
            (3, -1),
            (-3, 1),
            (-3, -1),
        ];
        for &(di, dj) in &OFFSETS {
            let ii = i as i64 + di;
            if ii < 0 || ii >= self.n_theta as i64 {
                continue;
            }
            let jj = (j as i64 + dj).rem_euclid(self.n_alpha as i64) as usize;
            let other = self.node(ii as usize, jj);
            out.push((other, self.segment_length(here, self.coords(other))));
        }
        // Tips are reachable from every ring radially.
        if i == 0 {
            out.push((self.tip_lo_node(), self.thetas[0] - self.tip_lo));
        }
        if i == self.n_theta - 1 {
            out.push((
                self.tip_hi_node(),
                self.tip_hi - self.thetas[self.n_theta - 1],
            ));
        }
        out
    }

    /// Dijkstra with parent tracking from one source.
    fn shortest_paths(&self, source: usize) -> (Vec<f64>, Vec<usize>) {
        let n = self.node_count();
        let mut dist = vec![f64::INFINITY; n];
        let mut parent = vec![usize::MAX; n];
        let mut heap = BinaryHeap::new();
        dist[source] = 0.0;
        heap.push(HeapItem {
            cost: 0.0,
            node: source,
        });
        while let Some(HeapItem { cost, node }) = heap.pop() {
            if cost > dist[node] {
                continue;
            }
            for (next, w) in self.neighbors(node) {
                let cand = cost + w;
                if cand < dist[next] {
                    dist[next] = cand;
                    parent[next] = node;
                    heap.push(HeapItem {
                        cost: cand,
                        node: next,
                    });
                }
            }
        }
        (dist, parent)
    }

    /// Shortens the extracted graph path by string pulling: the polyline is
    /// coarsened (chord shortcutting), relaxed, then refined with midpoint
    /// insertion and relaxed again, so both long-wavelength stencil zigzag
    /// and local discretization error are removed.
    fn refine_path(&self, path: &[(f64, f64)]) -> f64 {
        if path.len() < 2 {
            return 0.0;
        }
        // Unwrap the angular coordinate so the polyline is continuous.
        let mut pts: Vec<(f64, f64)> = Vec::with_capacity(path.len());
        let two_pi = 2.0 * std::f64::consts::PI;
        let mut prev_alpha = path[0].1;
        for &(th, al) in path {
            let mut a = al;
            while a - prev_alpha > std::f64::consts::PI {
                a -= two_pi;
            }
            while a - prev_alpha < -std::f64::consts::PI {
                a += two_pi;
            }
            prev_alpha = a;
            pts.push((th, a));
        }

        let (lo, hi) = self.profile.domain();
        let seg = |a: (f64, f64), b: (f64, f64)| {
            const NODES: [f64; 3] = [0.112701665379258, 0.5, 0.887298334620742];
            const WEIGHTS: [f64; 3] =
                [0.277777777777778, 0.444444444444444, 0.277777777777778];
            let (dth, dal) = (b.0 - a.0, b.1 - a.1);
            let mut acc = 0.0;
            for (u, w) in NODES.iter().zip(WEIGHTS.iter()) {
                let th = (a.0 + u * dth).clamp(lo, hi);
                let r = self.profile.eval(th);
                acc += w * (dth * dth + r * r * dal * dal).sqrt();
            }
            acc
        };

        // Coarsen aggressively; straight chart chords never lengthen the
        // path at this stage because they replace zigzag, and short
        // polylines let the relaxation converge globally before refining.
        let coarsen = |pts: &[(f64, f64)], target: usize| -> Vec<(f64, f64)> {
            if pts.len() <= target + 1 {
                return pts.to_vec();
            }
            let k = pts.len() - 1;
            (0..=target).map(|i| pts[(i * k) / target]).collect()
        };
        let mut poly = coarsen(&pts, 6);

        let relax = |poly: &mut Vec<(f64, f64)>, sweeps: usize| {
            for _ in 0..sweeps {
                let mut moved: f64 = 0.0;
                for idx in 1..poly.len() - 1 {
                    let (a, c) = (poly[idx - 1], poly[idx + 1]);
                    let b = poly[idx];
                    // Direction transverse to the chord, the zigzag mode.
                    let chord = (c.0 - a.0, c.1 - a.1);
                    let norm = (chord.0 * chord.0 + chord.1 * chord.1).sqrt();
                    if norm < 1e-14 {
                        continue;
                    }
                    let perp = (-chord.1 / norm, chord.0 / norm);
                    let sigma = 0.25 * norm;
                    let energy = |p: (f64, f64)| seg(a, p) + seg(p, c);
                    let e0 = energy(b);
                    // Parabolic line search along the transverse direction.
                    let bp = (b.0 + sigma * perp.0, b.1 + sigma * perp.1);
                    let bm = (b.0 - sigma * perp.0, b.1 - sigma * perp.1);
                    let (ep, em) = (energy(bp), energy(bm));
                    let denom = ep + em - 2.0 * e0;
                    let mut best = b;
                    let mut ebest = e0;
                    if denom > 1e-18 {
                        let t = (0.5 * (em - ep) / denom).clamp(-2.0, 2.0) * sigma;
                        let cand = ((b.0 + t * perp.0).clamp(lo, hi), b.1 + t * perp.1);
                        let ec = energy(cand);
                        if ec < ebest {
                            ebest = ec;
                            best = cand;
                        }
                    }
                    for (cand, e) in [(bp, ep), (bm, em)] {
                        if e < ebest {
                            ebest = e;
                            best = (cand.0.clamp(lo, hi), cand.1);
                        }
                    }
                    // Pull toward the chord midpoint as a fallback mode.
                    let mid = ((a.0 + c.0) / 2.0, (a.1 + c.1) / 2.0);
                    let toward = ((b.0 + mid.0) / 2.0, (b.1 + mid.1) / 2.0);
                    let et = energy((toward.0.clamp(lo, hi), toward.1));
                    if et < ebest {
                        ebest = et;
                        best = (toward.0.clamp(lo, hi), toward.1);
                    }
                    moved += (best.0 - b.0).abs() + (best.1 - b.1).abs();
                    poly[idx] = best;
                }
                if moved < 1e-12 {
                    break;
                }
            }
        };

        relax(&mut poly, 120);
        for sweeps in [60, 40, 25, 15] {
            let mut dense = Vec::with_capacity(poly.len() * 2);
            for w in poly.windows(2) {
                dense.push(w[0]);
                dense.push(((w[0].0 + w[1].0) / 2.0, (w[0].1 + w[1].1) / 2.0));
            }
            dense.push(*poly.last().unwrap());
            poly = dense;
            relax(&mut poly, sweeps);
        }
        poly.windows(2).map(|w| seg(w[0], w[1])).sum()
    }
}

/// Computes a [`DiscreteMetricSpace`] of geodesic distances on the profile
/// sphere dtheta^2 + R^2 dalpha^2. The output points are the two tips plus
/// a subsampled lattice of the computation grid; rotational symmetry reduces
/// the all-pairs problem to a per-row table.
pub fn surface_distances(
    profile: &ProfileFunction,
    grid: SurfaceGrid,
) -> Result<DiscreteMetricSpace> {
    if grid.n_alpha % (2 * grid.subsample) != 0 || grid.n_theta % grid.subsample != 0 {
        return Err(Error::Invalid(format!(
            "subsample {} must divide n_theta {} and half of n_alpha {}",
            grid.subsample, grid.n_theta, grid.n_alpha
        )));
    }
    let graph = SurfaceGraph::new(profile, grid.n_theta, grid.n_alpha);
    let (lo, hi) = profile.domain();

    // Row indices of the output lattice; by rotational symmetry the
    // distance between lattice points depends on the two rows and the
    // canonical angular offset only, so the table below is all that is
    // ever computed.
    let rows: Vec<usize> = (0..grid.n_theta).step_by(grid.subsample).collect();
    let n_rows = rows.len();
    let n_cols = grid.n_alpha / grid.subsample;
    let canon_cols: Vec<usize> = (0..=grid.n_alpha / 2).step_by(grid.subsample).collect();
    let n_canon = canon_cols.len();

    // Shortest paths from one representative per row (alpha = 0).
    let sources: Vec<usize> = rows.iter().map(|&i| graph.node(i, 0)).collect();
    let results: Vec<(Vec<f64>, Vec<usize>)> = sources
        .par_iter()
        .map(|&s| graph.shortest_paths(s))
        .collect();

    for (dist, _) in &results {
        if let Some(bad) = dist.iter().position(|d| !d.is_finite()) {
            return Err(Error::DisconnectedGraph { node: bad });
        }
    }

    // Distances from (row a, alpha 0) to (row b, canonical alpha column).
    // With refinement, each table entry re-measures the extracted path.
    let table: Vec<Vec<f64>> = results
        .par_iter()
        .map(|(dist, parent)| {
            let mut row_table = vec![0.0; n_rows * n_canon];
            for (bi, &rb) in rows.iter().enumerate() {
                for (k, &cb) in canon_cols.iter().enumerate() {
                    let target = graph.node(rb, cb);
                    let d = if grid.refine {
                        let mut path = Vec::new();
                        let mut cur = target;
                        while cur != usize::MAX {
                            path.push(graph.coords(cur));
                            cur = parent[cur];
                        }
                        path.reverse();
                        let refined = graph.refine_path(&path);
                        refined.min(dist[target])
                    } else {
                        dist[target]
                    };
                    row_table[bi * n_canon + k] = d;
                }
            }
            row_table
        })
        .collect();

    // Tip distances are radial, hence exact.
    let mut labels = Vec::with_capacity(n_rows * n_cols + 2);
    let mut coords = Vec::with_capacity(n_rows * n_cols + 2);
    for &ri in &rows {
        for k in 0..n_cols {
            labels.push(format!("g{}_{}", ri, k * grid.subsample));
            coords.push((graph.thetas[ri], k * grid.subsample));
        }
    }
    labels.push("tip_lo".into());
    labels.push("tip_hi".into());

    let n = labels.len();
    let mut dist = vec![0.0; n * n];
    let lattice = n_rows * n_cols;
    for a in 0..lattice {
        let (theta_a, col_a) = coords[a];
        let row_a = a / n_cols;
        for b in a..lattice {
            let (_, col_b) = coords[b];
            let row_b = b / n_cols;
            let offset =
                (col_b as i64 - col_a as i64).rem_euclid(grid.n_alpha as i64) as usize;
            let off = offset.min(grid.n_alpha - offset);
            let k = off / grid.subsample;
            let d = table[row_a][row_b * n_canon + k];
            dist[a * n + b] = d;
            dist[b * n + a] = d;
        }
        // Tip rows: radial distance is the latitude difference.
        let d_lo = theta_a - lo;
        let d_hi = hi - theta_a;
        dist[a * n + (n - 2)] = d_lo;
        dist[(n - 2) * n + a] = d_lo;
        dist[a * n + (n - 1)] = d_hi;
        dist[(n - 1) * n + a] = d_hi;
    }
    dist[(n - 2) * n + (n - 1)] = hi - lo;
    dist[(n - 1) * n + (n - 2)] = hi - lo;

    // Refined lengths are honest curve lengths, so min-plus closure only
    // tightens them toward the true metric and restores the triangle
    // inequality broken by per-path refinement noise.
    min_plus_closure(&mut dist, n);

    DiscreteMetricSpace::new(labels, dist)
}

fn min_plus_closure(dist: &mut [f64], n: usize) {
    for k in 0..n {
        for i in 0..n {
            let dik = dist[i * n + k];
            if !dik.is_finite() {
                continue;
            }
            for j in 0..n {
                let cand = dik + dist[k * n + j];
                if cand < dist[i * n + j] {
                    dist[i * n + j] = cand;
                }
            }
        }
    }
}

/// A pairing between two point sets that covers both.
#[derive(Clone, Debug)]
pub struct Correspondence {
    pub pairs: Vec<(usize, usize)>,
}

impl Correspondence {
    pub fn identity(n: usize) -> Self {
        Self {
            pairs: (0..n).map(|i| (i, i)).collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        Self {
            pairs: self.pairs.iter().map(|&(a, b)| (b, a)).collect(),
        }
    }

    fn check_covers(&self, nx: usize, ny: usize) -> Result<()> {
        let mut seen_x = vec![false; nx];
        let mut seen_y = vec![false; ny];
        for &(a, b) in &self.pairs {
            if a >= nx || b >= ny {
                return Err(Error::Invalid(format!(
                    "correspondence pair ({a},{b}) out of range ({nx},{ny})"
                )));
            }
            seen_x[a] = true;
            seen_y[b] = true;
        }
        let missing =
            seen_x.iter().filter(|&&s| !s).count() + seen_y.iter().filter(|&&s| !s).count();
        if missing > 0 {
            return Err(Error::NonCoveringCorrespondence { missing });
        }
        Ok(())
    }
}

/// Gromov-Hausdorff upper bound: half the supremal distortion of the
/// correspondence.
pub fn gh_upper_bound(
    x: &DiscreteMetricSpace,
    y: &DiscreteMetricSpace,
    corr: &Correspondence,
) -> Result<f64> {
    corr.check_covers(x.len(), y.len())?;
    let worst = corr
        .pairs
        .par_iter()
        .enumerate()
        .map(|(idx, &(a, b))| {
            let mut w: f64 = 0.0;
            for &(c, d) in &corr.pairs[idx..] {
                w = w.max((x.distance(a, c) - y.distance(b, d)).abs());
            }
            w
        })
        .reduce(|| 0.0, f64::max);
    Ok(worst / 2.0)
}

/// One row of a convergence study.
#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceRow {
    pub tau: f64,
    pub delta: f64,
    pub gh_bound: f64,
    pub min_curvature: f64,
}
