//! Replacement of non-C2 seams by quintic Hermite bands with a scalar
//! curvature floor check.

use super::glued::{one_sided, GluedMetric, SeamOrder};
use crate::error::{MslError, Result};
use crate::metric::{self, Metric1D, Transverse};
use crate::numeric::{linspace, PiecewisePolynomial};
use crate::radial::{Interval, RadialFn, WarpFn};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BandPlacement {
    Centered,
    /// The band lies on the side of increasing coordinate.
    Right,
    Left,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothingOptions {
    /// Total band width is `2 * half_width` when centered, `half_width` otherwise.
    pub half_width: f64,
    pub placement: BandPlacement,
    /// Lower bound the smoothed scalar curvature must respect inside the band.
    pub floor: Option<f64>,
    pub max_retries: usize,
    pub grid_points: usize,
}

impl SmoothingOptions {
    pub fn new(half_width: f64) -> Self {
        Self {
            half_width,
            placement: BandPlacement::Centered,
            floor: None,
            max_retries: 8,
            grid_points: metric::default_grid_points(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandReport {
    pub seam: f64,
    pub band: Interval,
    pub retries: usize,
    pub order_before: SeamOrder,
    /// `A_left - A_right` per warping at the seam.
    pub shape_jump: Vec<f64>,
    pub min_scalar: f64,
    pub min_location: f64,
    /// Effective floor checked inside the band, if any.
    pub floor: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothingReport {
    pub bands: Vec<BandReport>,
    /// Seams left untouched because their one-sided 2-jets already agree.
    pub already_c2: Vec<f64>,
}

fn shape_jump(left: &Metric1D, right: &Metric1D, x: f64) -> Vec<f64> {
    let l = one_sided(left, x);
    let r = one_sided(right, x);
    l.iter().zip(&r).map(|(a, b)| a[1] / a[0] - b[1] / b[0]).collect()
}

fn band_piece(left: &Metric1D, right: &Metric1D, a: f64, b: f64) -> Result<Metric1D> {
    let l = one_sided(left, a);
    let r = one_sided(right, b);
    let dom = Interval::new(a, b)?;
    let warpings = l
        .iter()
        .zip(&r)
        .map(|(dl, dr)| {
            let poly = PiecewisePolynomial::hermite(&[a, b], &[dl.to_vec(), dr.to_vec()])?;
            Ok(WarpFn::new(RadialFn::Spline { poly }, dom))
        })
        .collect::<Result<Vec<_>>>()?;
    Metric1D::new(left.kind, dom, warpings, Transverse::Arclength)
}

fn band_bounds(x: f64, w: f64, placement: BandPlacement) -> (f64, f64) {
    match placement {
        BandPlacement::Centered => (x - w, x + w),
        BandPlacement::Right => (x, x + w),
        BandPlacement::Left => (x - w, x),
    }
}

/// Smooths every seam whose one-sided 2-jets differ. C0 seams must be
/// convexifying (`A_left > A_right`); for them the band's scalar curvature
/// must also stay above the smaller one-sided value at the seam. Bands that
/// violate a floor are retried with half the width.
pub fn smooth_seams(g: &GluedMetric, opts: &SmoothingOptions) -> Result<(GluedMetric, SmoothingReport)> {
    if !(opts.half_width > 0.0) {
        return Err(MslError::InvalidInput("band half-width must be positive".into()));
    }
    let mut pieces: Vec<Metric1D> = vec![g.pieces[0].clone()];
    let mut bands: Vec<bool> = vec![g.bands[0]];
    let mut targets: Vec<SeamOrder> = Vec::new();
    let mut report = SmoothingReport {
        bands: vec![],
        already_c2: vec![],
    };
    for (i, seam) in g.seams.iter().enumerate() {
        let right = &g.pieces[i + 1];
        let left = pieces.last().unwrap().clone();
        let x = seam.location;
        let scale = one_sided(&left, x)[0];
        let order = seam.measured_order(&scale);
        if order == SeamOrder::C2 {
            report.already_c2.push(x);
            targets.push(SeamOrder::C2);
            pieces.push(right.clone());
            bands.push(g.bands[i + 1]);
            continue;
        }
        if [&left, right]
            .iter()
            .any(|p| !matches!(p.transverse, Transverse::Arclength))
        {
            return Err(MslError::InvalidInput(
                "seam smoothing needs arclength coordinates".into(),
            ));
        }
        let jump = shape_jump(&left, right, x);
        let mut floor = opts.floor;
        if order == SeamOrder::C0 {
            if let Some(j) = jump.iter().copied().find(|j| !(*j > 0.0)) {
                return Err(MslError::SeamNotConvexifying { location: x, jump: j });
            }
            let sl = metric::scalar_curvature(&left, &[x])?[0];
            let sr = metric::scalar_curvature(right, &[x])?[0];
            let one_sided_min = sl.min(sr);
            floor = Some(floor.map_or(one_sided_min, |f| f.max(one_sided_min)));
        }
        let mut w = opts.half_width;
        let mut attempt = 0;
        let (band, lo, hi, smin, sloc) = loop {
            let (a, b) = band_bounds(x, w, opts.placement);
            if a <= left.domain.lo || b >= right.domain.hi {
                if attempt >= opts.max_retries {
                    return Err(MslError::InvalidInput(format!(
                        "no room for a smoothing band around the seam at {x}"
                    )));
                }
                w *= 0.5;
                attempt += 1;
                continue;
            }
            let band = band_piece(&left, right, a, b)?;
            let grid = linspace(a, b, opts.grid_points * metric::BAND_REFINEMENT);
            let s = metric::scalar_curvature(&band, &grid)?;
            let (imin, smin) = s
                .iter()
                .enumerate()
                .fold((0, f64::INFINITY), |acc, (k, v)| if *v < acc.1 { (k, *v) } else { acc });
            let ok = match floor {
                None => true,
                Some(fl) => {
                    let smax = s.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                    smin >= fl - 1e-9 * smax.max(fl.abs())
                }
            };
            if ok {
                break (band, a, b, smin, grid[imin]);
            }
            if attempt >= opts.max_retries {
                return Err(MslError::FloorUnachievable {
                    floor: floor.unwrap_or(f64::NEG_INFINITY),
                    worst_location: grid[imin],
                    margin: smin - floor.unwrap_or(f64::NEG_INFINITY),
                });
            }
            w *= 0.5;
            attempt += 1;
        };
        let kept_left = left.restricted(Interval::new(left.domain.lo, lo)?)?;
        let kept_right = right.restricted(Interval::new(hi, right.domain.hi)?)?;
        *pieces.last_mut().unwrap() = kept_left;
        targets.push(SeamOrder::C2);
        pieces.push(band);
        bands.push(true);
        targets.push(SeamOrder::C2);
        pieces.push(kept_right);
        bands.push(g.bands[i + 1]);
        report.bands.push(BandReport {
            seam: x,
            band: Interval { lo, hi },
            retries: attempt,
            order_before: order,
            shape_jump: jump,
            min_scalar: smin,
            min_location: sloc,
            floor,
        });
    }
    Ok((GluedMetric::with_bands(pieces, targets, bands)?, report))
}

/// Samples `(r, f, f', f'', s)` of the first warping across each band.
pub fn band_samples(g: &GluedMetric, n: usize) -> Result<Vec<[f64; 5]>> {
    let mut rows = Vec::new();
    for (p, band) in g.pieces.iter().zip(&g.bands) {
        if !*band {
            continue;
        }
        let grid = linspace(p.domain.lo, p.domain.hi, n.max(2));
        let s = metric::scalar_curvature(p, &grid)?;
        for (x, sv) in grid.iter().zip(s) {
            let d = p.warp(0).derivs::<3>(*x);
            rows.push([*x, d[0], d[1], d[2], sv]);
        }
    }
    Ok(rows)
}
