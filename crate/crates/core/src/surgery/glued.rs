use crate::error::{MslError, Result};
use crate::metric::{self, Metric1D};
use crate::numeric;
use crate::radial::Interval;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeamOrder {
    C0,
    C1,
    C2,
}

/// Jumps `right - left` of a warping and its first two arclength derivatives.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WarpJump {
    pub value: f64,
    pub first: f64,
    pub second: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Seam {
    pub location: f64,
    pub target: SeamOrder,
    pub jumps: Vec<WarpJump>,
}

impl Seam {
    /// Highest order to which the one-sided jets agree (relative 1e-9).
    pub fn measured_order(&self, scale: &[f64; 3]) -> SeamOrder {
        let ok = |j: &WarpJump, k: usize| {
            let v = [j.value, j.first, j.second][k];
            v.abs() <= 1e-9 * (1.0 + scale[k].abs())
        };
        if self.jumps.iter().all(|j| ok(j, 0) && ok(j, 1) && ok(j, 2)) {
            SeamOrder::C2
        } else if self.jumps.iter().all(|j| ok(j, 0) && ok(j, 1)) {
            SeamOrder::C1
        } else {
            SeamOrder::C0
        }
    }
}

/// Piecewise metric: consecutive pieces share their endpoints at seams.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GluedMetric {
    pub pieces: Vec<Metric1D>,
    pub seams: Vec<Seam>,
    /// Pieces produced by smoothing; their grids are refined.
    pub bands: Vec<bool>,
}

/// Anything made of reduced pieces.
pub trait Reduced {
    fn pieces(&self) -> &[Metric1D];

    fn domain(&self) -> Interval {
        let p = self.pieces();
        Interval {
            lo: p[0].domain.lo,
            hi: p[p.len() - 1].domain.hi,
        }
    }
}

impl Reduced for Metric1D {
    fn pieces(&self) -> &[Metric1D] {
        std::slice::from_ref(self)
    }
}

impl Reduced for GluedMetric {
    fn pieces(&self) -> &[Metric1D] {
        &self.pieces
    }
}

pub(crate) fn one_sided(m: &Metric1D, x: f64) -> Vec<[f64; 3]> {
    let loc = m.local::<3>(x);
    let n = if m.is_spherical() { 1 } else { 2 };
    (0..n)
        .map(|i| {
            let d = loc.f[i].derivatives();
            [d[0], d[1], d[2]]
        })
        .collect()
}

pub(crate) fn measure_jumps(left: &Metric1D, right: &Metric1D, x: f64) -> Vec<WarpJump> {
    let l = one_sided(left, x);
    let r = one_sided(right, x);
    l.iter()
        .zip(&r)
        .map(|(a, b)| WarpJump {
            value: b[0] - a[0],
            first: b[1] - a[1],
            second: b[2] - a[2],
        })
        .collect()
}

impl GluedMetric {
    /// Glues consecutive pieces; `targets[i]` is the declared regularity of
    /// the seam between piece `i` and `i + 1`, and is verified.
    pub fn new(pieces: Vec<Metric1D>, targets: Vec<SeamOrder>) -> Result<Self> {
        let bands = vec![false; pieces.len()];
        Self::with_bands(pieces, targets, bands)
    }

    pub fn with_bands(pieces: Vec<Metric1D>, targets: Vec<SeamOrder>, bands: Vec<bool>) -> Result<Self> {
        if pieces.is_empty() || targets.len() + 1 != pieces.len() || bands.len() != pieces.len() {
            return Err(MslError::InvalidInput("n pieces need n - 1 seams".into()));
        }
        let mut seams = Vec::with_capacity(targets.len());
        for (i, target) in targets.into_iter().enumerate() {
            let (l, r) = (&pieces[i], &pieces[i + 1]);
            if l.kind != r.kind {
                return Err(MslError::InvalidInput(format!(
                    "pieces {i} and {} have different forms",
                    i + 1
                )));
            }
            let x = l.domain.hi;
            if (r.domain.lo - x).abs() > 1e-12 * (1.0 + x.abs()) {
                return Err(MslError::InvalidInput(format!(
                    "pieces {i} and {} are not contiguous ({} vs {})",
                    i + 1,
                    x,
                    r.domain.lo
                )));
            }
            let jumps = measure_jumps(l, r, x);
            let seam = Seam {
                location: x,
                target,
                jumps,
            };
            let scale = one_sided(l, x)[0];
            if seam.measured_order(&scale) < target {
                return Err(MslError::InvalidInput(format!(
                    "seam at {x} does not reach declared regularity {target:?}: jumps {:?}",
                    seam.jumps
                )));
            }
            seams.push(seam);
        }
        Ok(Self { pieces, seams, bands })
    }

    pub fn domain(&self) -> Interval {
        Reduced::domain(self)
    }

    /// Index of the piece containing `x`; seams belong to the right piece.
    pub fn piece_index(&self, x: f64) -> Result<usize> {
        let d = self.domain();
        if !d.contains(x) {
            return Err(MslError::GridOutOfDomain {
                point: x,
                lo: d.lo,
                hi: d.hi,
            });
        }
        Ok(self
            .pieces
            .iter()
            .position(|p| x < p.domain.hi)
            .unwrap_or(self.pieces.len() - 1))
    }

    pub fn piece_at(&self, x: f64) -> Result<&Metric1D> {
        Ok(&self.pieces[self.piece_index(x)?])
    }

    /// Default grid: `n` points per piece, `n * 4` inside smoothing bands,
    /// seams shared.
    pub fn grid(&self, n: usize) -> Result<Vec<f64>> {
        let mut out: Vec<f64> = Vec::new();
        for (p, band) in self.pieces.iter().zip(&self.bands) {
            let k = if *band { n * metric::BAND_REFINEMENT } else { n };
            let g = p.uniform_grid(k)?;
            let skip = usize::from(!out.is_empty());
            out.extend(g.into_iter().skip(skip));
        }
        Ok(out)
    }

    pub fn scalar_curvature(&self, grid: &[f64]) -> Result<Vec<f64>> {
        grid.iter()
            .map(|&x| Ok(metric::scalar_curvature(self.piece_at(x)?, &[x])?[0]))
            .collect()
    }

    pub fn warpings_at(&self, x: f64) -> Result<Vec<[f64; 3]>> {
        Ok(one_sided(self.piece_at(x)?, x))
    }

    pub fn volume(&self) -> Result<f64> {
        self.pieces.iter().map(|p| metric::volume(p, None)).sum()
    }

    pub fn volume_between(&self, a: f64, b: f64) -> Result<f64> {
        let mut total = 0.0;
        for p in &self.pieces {
            let lo = a.max(p.domain.lo);
            let hi = b.min(p.domain.hi);
            if hi > lo {
                total += p.volume_between(lo, hi)?;
            }
        }
        Ok(total)
    }

    /// Restriction to `[a, b]`, dropping pieces outside it.
    pub fn restricted(&self, a: f64, b: f64) -> Result<Self> {
        let mut pieces = Vec::new();
        let mut bands = Vec::new();
        let mut targets = Vec::new();
        for (i, p) in self.pieces.iter().enumerate() {
            let lo = a.max(p.domain.lo);
            let hi = b.min(p.domain.hi);
            if hi > lo {
                if !pieces.is_empty() {
                    targets.push(self.seams[i - 1].target);
                }
                pieces.push(p.restricted(Interval::new(lo, hi)?)?);
                bands.push(self.bands[i]);
            }
        }
        Self::with_bands(pieces, targets, bands)
    }

    pub fn seam_grid_sample(&self, n: usize) -> Result<Vec<f64>> {
        let d = self.domain();
        Ok(numeric::linspace(d.lo, d.hi, n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::RadialFn;

    fn flat(lo: f64, hi: f64) -> Metric1D {
        Metric1D::spherical(
            RadialFn::Affine {
                slope: 1.0,
                intercept: 0.0,
            },
            Interval::new(lo, hi).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn contiguous_flat_pieces_are_c2() {
        let g = GluedMetric::new(vec![flat(0.0, 1.0), flat(1.0, 2.0)], vec![SeamOrder::C2]).unwrap();
        assert_eq!(g.seams[0].jumps[0].value, 0.0);
        assert_eq!(g.piece_index(1.0).unwrap(), 1);
        assert!((g.volume().unwrap() - 4.0 * std::f64::consts::PI * 8.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn gap_rejected() {
        assert!(GluedMetric::new(vec![flat(0.0, 1.0), flat(1.5, 2.0)], vec![SeamOrder::C0]).is_err());
    }

    #[test]
    fn kink_fails_c1_declaration() {
        let kinked = Metric1D::spherical(
            RadialFn::Affine {
                slope: 0.5,
                intercept: 0.5,
            },
            Interval::new(1.0, 2.0).unwrap(),
        )
        .unwrap();
        assert!(GluedMetric::new(vec![flat(0.0, 1.0), kinked.clone()], vec![SeamOrder::C1]).is_err());
        let g = GluedMetric::new(vec![flat(0.0, 1.0), kinked], vec![SeamOrder::C0]).unwrap();
        assert!((g.seams[0].jumps[0].first + 0.5).abs() < 1e-15);
    }
}
