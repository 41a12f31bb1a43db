use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Power iteration cap.
pub const MAX_ITERATIONS: usize = 100_000;
/// Default relative gap between the Collatz-Wielandt bounds at which
/// iteration stops.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Square matrix with finite nonnegative entries, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct NonnegativeMatrix {
    order: usize,
    entries: Vec<f64>,
}

impl TryFrom<Vec<Vec<f64>>> for NonnegativeMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_rows(&rows)
    }
}

impl From<NonnegativeMatrix> for Vec<Vec<f64>> {
    fn from(m: NonnegativeMatrix) -> Self {
        m.rows()
    }
}

impl NonnegativeMatrix {
    pub fn new(order: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != order * order {
            return Err(Error::InvalidMatrix(format!(
                "expected {} entries for order {order}, got {}",
                order * order,
                entries.len()
            )));
        }
        if let Some(bad) = entries.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidMatrix(format!(
                "entries must be finite and nonnegative, found {bad}"
            )));
        }
        Ok(Self { order, entries })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let order = rows.len();
        if rows.iter().any(|r| r.len() != order) {
            return Err(Error::InvalidMatrix("matrix must be square".into()));
        }
        Self::new(order, rows.concat())
    }

    pub fn zeros(order: usize) -> Self {
        Self {
            order,
            entries: vec![0.0; order * order],
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.order + j]
    }

    /// Sets an entry. Panics on negative or non-finite values.
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        assert!(value.is_finite() && value >= 0.0, "entry must be >= 0");
        self.entries[i * self.order + j] = value;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.order..(i + 1) * self.order]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.order).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn max_entry(&self) -> f64 {
        self.entries.iter().copied().fold(0.0, f64::max)
    }

    /// `diag(d) * self`.
    pub fn scale_rows(&self, d: &[f64]) -> Result<Self> {
        assert_eq!(d.len(), self.order);
        let entries = self
            .entries
            .iter()
            .enumerate()
            .map(|(k, v)| v * d[k / self.order])
            .collect();
        Self::new(self.order, entries)
    }

    fn support(&self) -> BoolMatrix {
        BoolMatrix {
            n: self.order,
            bits: self.entries.iter().map(|&v| v > 0.0).collect(),
        }
    }

    fn mul_vec(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.row(i).iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }
}

#[derive(Clone, PartialEq)]
struct BoolMatrix {
    n: usize,
    bits: Vec<bool>,
}

impl BoolMatrix {
    fn identity(n: usize) -> Self {
        let mut bits = vec![false; n * n];
        for i in 0..n {
            bits[i * n + i] = true;
        }
        Self { n, bits }
    }

    fn mul(&self, other: &Self) -> Self {
        let n = self.n;
        let mut bits = vec![false; n * n];
        for i in 0..n {
            for k in 0..n {
                if self.bits[i * n + k] {
                    for j in 0..n {
                        bits[i * n + j] |= other.bits[k * n + j];
                    }
                }
            }
        }
        Self { n, bits }
    }

    fn or_identity(&self) -> Self {
        let mut out = self.clone();
        for i in 0..self.n {
            out.bits[i * self.n + i] = true;
        }
        out
    }

    fn pow(&self, mut e: usize) -> Self {
        let mut base = self.clone();
        let mut acc = Self::identity(self.n);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    fn all(&self) -> bool {
        self.bits.iter().all(|&b| b)
    }
}

/// Irreducibility test: `(I + A)^(n-1)` has no zero entry.
///
/// Works on the 0/1 support pattern with boolean products, so the powers
/// cannot overflow. An empty matrix is not irreducible.
pub fn check_irreducible(a: &NonnegativeMatrix) -> bool {
    let n = a.order();
    if n == 0 {
        return false;
    }
    a.support().or_identity().pow(n - 1).all()
}

/// Primitivity test by Wielandt's bound: an irreducible matrix is primitive
/// iff `A^((n-1)^2 + 1)` is positive.
pub fn is_primitive(a: &NonnegativeMatrix) -> bool {
    let n = a.order();
    if n == 0 {
        return false;
    }
    a.support().pow((n - 1) * (n - 1) + 1).all()
}

/// Perron root of an irreducible nonnegative matrix by power iteration.
///
/// Starts from the all-ones vector and stops when the Collatz-Wielandt
/// bounds `min (Ax)_i / x_i <= rho <= max (Ax)_i / x_i` agree to relative
/// `tol`. Periodic supports are handled by iterating on `A + sigma I`
/// with `sigma` equal to the largest row sum, then subtracting `sigma`.
pub fn spectral_radius(a: &NonnegativeMatrix, tol: f64) -> Result<f64> {
    assert!(tol > 0.0, "tolerance must be positive");
    if !check_irreducible(a) {
        return Err(Error::Reducible);
    }
    let n = a.order();
    if n == 1 {
        return Ok(a.get(0, 0));
    }
    let periodic = !is_primitive(a);
    let shift = if periodic {
        (0..n)
            .map(|i| a.row(i).iter().sum::<f64>())
            .fold(0.0, f64::max)
    } else {
        0.0
    };

    let mut x = vec![1.0; n];
    let mut y = vec![0.0; n];
    let mut gap = f64::INFINITY;
    for _ in 0..MAX_ITERATIONS {
        a.mul_vec(&x, &mut y);
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for i in 0..n {
            y[i] += shift * x[i];
            let r = y[i] / x[i];
            lo = lo.min(r);
            hi = hi.max(r);
        }
        gap = (hi - lo) / hi;
        if gap <= tol {
            return Ok(0.5 * (lo + hi) - shift);
        }
        let norm = y.iter().copied().fold(0.0, f64::max);
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / norm;
        }
    }
    Err(Error::NoConvergence {
        iterations: MAX_ITERATIONS,
        gap,
        periodic,
    })
}

/// Spectral radius of any nonnegative matrix: the largest Perron root over
/// the strongly connected components of the support digraph. A component
/// that is a single vertex contributes its diagonal entry.
pub fn spectral_radius_general(a: &NonnegativeMatrix, tol: f64) -> Result<f64> {
    let n = a.order();
    let mut graph = DiGraph::<(), ()>::with_capacity(n, n * n);
    let nodes: Vec<_> = (0..n).map(|_| graph.add_node(())).collect();
    for i in 0..n {
        for j in 0..n {
            if a.get(i, j) > 0.0 {
                graph.add_edge(nodes[i], nodes[j], ());
            }
        }
    }
    let mut rho = 0.0f64;
    for component in tarjan_scc(&graph) {
        let idx: Vec<usize> = component.iter().map(|v| v.index()).collect();
        let block = if idx.len() == 1 {
            a.get(idx[0], idx[0])
        } else {
            let entries = idx
                .iter()
                .flat_map(|&i| idx.iter().map(move |&j| (i, j)))
                .map(|(i, j)| a.get(i, j))
                .collect();
            spectral_radius(&NonnegativeMatrix::new(idx.len(), entries)?, tol)?
        };
        rho = rho.max(block);
    }
    Ok(rho)
}
