use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use super::{ScalarFunctionSpec, Wave};

/// Minimum and maximum of `|f|` over a closed interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AbsExtrema {
    pub min_abs: f64,
    pub max_abs: f64,
}

/// Lipschitz constant of `spec` on `[lo, hi]`: the maximum of `|f'|`.
///
/// Exact for constant, affine and sinusoidal specs; a certified upper bound
/// otherwise.
pub fn lipschitz_bound(spec: &ScalarFunctionSpec, lo: f64, hi: f64) -> f64 {
    abs_extrema(&spec.derivative(), lo, hi).max_abs
}

/// Extrema of `|f|` on `[lo, hi]`.
///
/// Closed form for constant, affine and sinusoidal specs (and scalings of
/// them). Everything else goes through certified refinement: the returned
/// `min_abs` never exceeds the true minimum and `max_abs` is never below the
/// true maximum, each within a relative slack of about 1e-11.
pub fn abs_extrema(spec: &ScalarFunctionSpec, lo: f64, hi: f64) -> AbsExtrema {
    assert!(lo <= hi, "abs_extrema: empty interval [{lo}, {hi}]");
    closed_form(spec, lo, hi).unwrap_or_else(|| refine(spec, lo, hi))
}

fn closed_form(spec: &ScalarFunctionSpec, lo: f64, hi: f64) -> Option<AbsExtrema> {
    match spec {
        ScalarFunctionSpec::Constant { value } => Some(AbsExtrema {
            min_abs: value.abs(),
            max_abs: value.abs(),
        }),
        ScalarFunctionSpec::Affine { .. } => {
            let (a, b) = (spec.eval(lo), spec.eval(hi));
            let min_abs = if a.signum() != b.signum() && a != 0.0 && b != 0.0 {
                0.0
            } else {
                a.abs().min(b.abs())
            };
            Some(AbsExtrema {
                min_abs,
                max_abs: a.abs().max(b.abs()),
            })
        }
        ScalarFunctionSpec::Sinusoid {
            amplitude,
            omega,
            phase,
            wave,
        } => {
            let (ta, tb) = (omega * lo + phase, omega * hi + phase);
            let (t_lo, t_hi) = (ta.min(tb), ta.max(tb));
            // |cos| peaks at m*pi and vanishes at pi/2 + m*pi; sin is shifted
            let (peak_offset, zero_offset) = match wave {
                Wave::Cos => (0.0, FRAC_PI_2),
                Wave::Sin => (FRAC_PI_2, 0.0),
            };
            let hits = |offset: f64| {
                let m = ((t_lo - offset) / PI).ceil();
                m * PI + offset <= t_hi
            };
            let (a, b) = (spec.eval(lo).abs(), spec.eval(hi).abs());
            let amp = amplitude.abs();
            Some(AbsExtrema {
                min_abs: if hits(zero_offset) { 0.0 } else { a.min(b) },
                max_abs: if hits(peak_offset) {
                    amp
                } else {
                    a.max(b).min(amp)
                },
            })
        }
        ScalarFunctionSpec::Scaled { factor, inner } => {
            closed_form(inner, lo, hi).map(|e| AbsExtrema {
                min_abs: factor.abs() * e.min_abs,
                max_abs: factor.abs() * e.max_abs,
            })
        }
        _ => None,
    }
}

const MIN_WIDTH_FRACTION: f64 = 1e-6;
const REL_TOL: f64 = 1e-11;
const MAX_CELLS: usize = 200_000;

#[derive(Clone, Copy)]
struct Cell {
    lo: f64,
    hi: f64,
    key: f64,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key.total_cmp(&other.key)
    }
}

/// Enclosure of `f` on a cell from the midpoint Taylor expansion with a
/// bound on the second derivative.
struct Enclosure<'a> {
    f: &'a ScalarFunctionSpec,
    df: ScalarFunctionSpec,
    ddf: ScalarFunctionSpec,
}

impl Enclosure<'_> {
    fn range(&self, lo: f64, hi: f64) -> (f64, f64) {
        let m = 0.5 * (lo + hi);
        let h = 0.5 * (hi - lo);
        let fm = self.f.eval(m);
        let spread = self.df.eval(m).abs() * h + 0.5 * self.ddf.coarse_abs_bound(lo, hi) * h * h;
        (fm - spread, fm + spread)
    }

    fn abs_upper(&self, lo: f64, hi: f64) -> f64 {
        let (a, b) = self.range(lo, hi);
        a.abs().max(b.abs())
    }

    fn abs_lower(&self, lo: f64, hi: f64) -> f64 {
        let (a, b) = self.range(lo, hi);
        if a > 0.0 {
            a
        } else if b < 0.0 {
            -b
        } else {
            0.0
        }
    }
}

fn refine(spec: &ScalarFunctionSpec, lo: f64, hi: f64) -> AbsExtrema {
    let enc = Enclosure {
        f: spec,
        df: spec.derivative(),
        ddf: spec.derivative().derivative(),
    };
    let sample = |x: f64| spec.eval(x).abs();
    let min_width = MIN_WIDTH_FRACTION * (hi - lo);

    // maximum: best-first on the upper bound
    let mut best = sample(lo).max(sample(hi)).max(sample(0.5 * (lo + hi)));
    let mut unresolved = f64::NEG_INFINITY;
    let mut heap = BinaryHeap::new();
    heap.push(Cell {
        lo,
        hi,
        key: enc.abs_upper(lo, hi),
    });
    let mut processed = 0;
    while let Some(cell) = heap.pop() {
        if cell.key <= best + REL_TOL * (1.0 + best) {
            unresolved = unresolved.max(cell.key);
            break;
        }
        processed += 1;
        if cell.hi - cell.lo < min_width || processed > MAX_CELLS {
            unresolved = unresolved.max(cell.key);
            continue;
        }
        let mid = 0.5 * (cell.lo + cell.hi);
        best = best.max(sample(mid));
        for (a, b) in [(cell.lo, mid), (mid, cell.hi)] {
            best = best.max(sample(0.5 * (a + b)));
            heap.push(Cell {
                lo: a,
                hi: b,
                key: enc.abs_upper(a, b),
            });
        }
    }
    let max_abs = best.max(unresolved);

    // minimum: best-first on the lower bound (keys negated for the max-heap)
    let mut best = sample(lo).min(sample(hi)).min(sample(0.5 * (lo + hi)));
    let mut unresolved = f64::INFINITY;
    let mut heap = BinaryHeap::new();
    heap.push(Cell {
        lo,
        hi,
        key: -enc.abs_lower(lo, hi),
    });
    let mut processed = 0;
    while let Some(cell) = heap.pop() {
        let lower = -cell.key;
        if lower >= best - REL_TOL * (1.0 + best) {
            unresolved = unresolved.min(lower);
            break;
        }
        processed += 1;
        if cell.hi - cell.lo < min_width || processed > MAX_CELLS {
            unresolved = unresolved.min(lower);
            continue;
        }
        let mid = 0.5 * (cell.lo + cell.hi);
        best = best.min(sample(mid));
        for (a, b) in [(cell.lo, mid), (mid, cell.hi)] {
            best = best.min(sample(0.5 * (a + b)));
            heap.push(Cell {
                lo: a,
                hi: b,
                key: -enc.abs_lower(a, b),
            });
        }
    }
    let min_abs = best.min(unresolved).max(0.0);

    AbsExtrema { min_abs, max_abs }
}
