//! Splicing, ratio imputation, directional allocation and interpolation on
//! year-indexed series.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{PanelError, Result};

/// Years used to estimate a splice factor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Overlap {
    /// Years observed in both series. Empty means every common year.
    Years(Vec<i32>),
    /// Non-overlapping series joined at the boundary: the reference value
    /// of `reference_year` against the source value of `source_year`.
    Adjacent { reference_year: i32, source_year: i32 },
}

/// Factor that maps a source series onto the scale of a reference series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpliceFactor {
    pub factor: f64,
    /// Years whose ratios were averaged.
    pub years: Vec<i32>,
    /// Largest relative gap `|factor * source - reference| / |reference|`
    /// over the calibration years.
    pub max_discontinuity: f64,
    /// `max_discontinuity` above [`SpliceFactor::DISCONTINUITY_LIMIT`].
    pub flagged: bool,
}

impl SpliceFactor {
    pub const DISCONTINUITY_LIMIT: f64 = 0.05;

    pub fn apply(&self, value: f64) -> f64 {
        value * self.factor
    }
}

/// Mean of `reference / source` over the overlap.
pub fn calibrate_overlap(
    reference: &BTreeMap<i32, f64>,
    source: &BTreeMap<i32, f64>,
    overlap: &Overlap,
) -> Result<SpliceFactor> {
    let pairs: Vec<(i32, f64, f64)> = match overlap {
        Overlap::Years(years) => {
            let years: Vec<i32> = if years.is_empty() {
                reference.keys().filter(|y| source.contains_key(y)).copied().collect()
            } else {
                years.clone()
            };
            if years.is_empty() {
                return Err(PanelError::NoOverlap("series share no years".into()));
            }
            years
                .iter()
                .map(|&y| match (reference.get(&y), source.get(&y)) {
                    (Some(&r), Some(&s)) => Ok((y, r, s)),
                    _ => Err(PanelError::NoOverlap(format!("{y} not observed in both series"))),
                })
                .collect::<Result<_>>()?
        }
        Overlap::Adjacent {
            reference_year,
            source_year,
        } => match (reference.get(reference_year), source.get(source_year)) {
            (Some(&r), Some(&s)) => vec![(*source_year, r, s)],
            _ => {
                return Err(PanelError::NoOverlap(format!(
                    "boundary years {reference_year}/{source_year} not observed"
                )))
            }
        },
    };
    let mut sum = 0.0;
    for &(y, r, s) in &pairs {
        if s == 0.0 {
            return Err(PanelError::ZeroDenominator(y));
        }
        sum += r / s;
    }
    let factor = sum / pairs.len() as f64;
    let max_discontinuity = pairs
        .iter()
        .map(|&(_, r, s)| {
            if r == 0.0 {
                if factor * s == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            } else {
                ((factor * s - r) / r).abs()
            }
        })
        .fold(0.0, f64::max);
    Ok(SpliceFactor {
        factor,
        years: pairs.iter().map(|p| p.0).collect(),
        max_discontinuity,
        // slack so an exact 5% gap is not flagged through rounding
        flagged: max_discontinuity > SpliceFactor::DISCONTINUITY_LIMIT + 1e-12,
    })
}

/// Result of a fixed-ratio imputation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioFill {
    /// Mean of `target / reference` over the anchor years.
    pub ratio: f64,
    pub anchors: Vec<i32>,
    /// Newly filled years only.
    pub filled: BTreeMap<i32, f64>,
}

/// Fills the years missing from `target` as `ratio * reference`, with the
/// ratio averaged over `anchors`. Without `years`, every reference year is
/// a candidate; with `years = (first, last)` only that range is, and each
/// missing year in it must have a reference value.
pub fn fixed_ratio_impute(
    target: &BTreeMap<i32, f64>,
    reference: &BTreeMap<i32, f64>,
    anchors: &[i32],
    years: Option<(i32, i32)>,
) -> Result<RatioFill> {
    if anchors.is_empty() {
        return Err(PanelError::Config("ratio imputation needs at least one anchor year".into()));
    }
    let mut sum = 0.0;
    for &a in anchors {
        match (target.get(&a), reference.get(&a)) {
            (Some(&t), Some(&r)) => {
                if r == 0.0 {
                    return Err(PanelError::ZeroDenominator(a));
                }
                sum += t / r;
            }
            _ => return Err(PanelError::NoAnchor(a)),
        }
    }
    let ratio = sum / anchors.len() as f64;
    let mut filled = BTreeMap::new();
    match years {
        Some((first, last)) => {
            for y in first..=last {
                if target.contains_key(&y) {
                    continue;
                }
                let r = reference.get(&y).ok_or(PanelError::ReferenceGap(y))?;
                filled.insert(y, ratio * r);
            }
        }
        None => {
            for (&y, &r) in reference {
                if !target.contains_key(&y) {
                    filled.insert(y, ratio * r);
                }
            }
        }
    }
    Ok(RatioFill {
        ratio,
        anchors: anchors.to_vec(),
        filled,
    })
}

/// Linear interpolation of interior gaps. Returns the filled years only.
/// With `span`, every year of the span must lie between two observations.
pub fn interpolate_linear(
    observed: &BTreeMap<i32, f64>,
    span: Option<(i32, i32)>,
) -> Result<BTreeMap<i32, f64>> {
    if observed.len() < 2 {
        return Err(PanelError::TooFewPoints(observed.len()));
    }
    let first = *observed.keys().next().unwrap();
    let last = *observed.keys().next_back().unwrap();
    if let Some((lo, hi)) = span {
        if lo < first {
            return Err(PanelError::ExtrapolationRequired(lo));
        }
        if hi > last {
            return Err(PanelError::ExtrapolationRequired(hi));
        }
    }
    let (lo, hi) = span.unwrap_or((first, last));
    let mut filled = BTreeMap::new();
    let points: Vec<(i32, f64)> = observed.iter().map(|(y, v)| (*y, *v)).collect();
    for w in points.windows(2) {
        let ((y0, a), (y1, b)) = (w[0], w[1]);
        for y in (y0 + 1).max(lo)..y1.min(hi + 1) {
            let v = a + (b - a) * f64::from(y - y0) / f64::from(y1 - y0);
            filled.insert(y, v);
        }
    }
    Ok(filled)
}

/// One year split between eastbound and westbound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Allocation {
    pub year: i32,
    pub reference_year: i32,
    pub eastbound: f64,
    pub westbound: f64,
}

/// Splits `total` into eastbound and westbound for every year where the
/// total is known and both directions are missing, using the directional
/// shares of the closest year with both directions observed (the later one
/// on ties). The two parts add back to the total exactly.
pub fn allocate_directional(
    total: &BTreeMap<i32, f64>,
    eastbound: &BTreeMap<i32, f64>,
    westbound: &BTreeMap<i32, f64>,
) -> Result<Vec<Allocation>> {
    let both: Vec<i32> = eastbound
        .keys()
        .filter(|y| westbound.contains_key(y))
        .copied()
        .collect();
    let mut out = Vec::new();
    for (&year, &t) in total {
        if eastbound.contains_key(&year) || westbound.contains_key(&year) {
            continue;
        }
        let reference_year = both
            .iter()
            .copied()
            .min_by_key(|&y| ((y - year).abs(), -y))
            .ok_or(PanelError::NoAnchor(year))?;
        let e = eastbound[&reference_year];
        let w = westbound[&reference_year];
        if !(e > 0.0 && w > 0.0) {
            return Err(PanelError::ZeroReference);
        }
        let east = t * e / (e + w);
        out.push(Allocation {
            year,
            reference_year,
            eastbound: east,
            westbound: t - east,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(pairs: &[(i32, f64)]) -> BTreeMap<i32, f64> {
        pairs.iter().copied().collect()
    }

    #[test]
    fn splice_single_year() {
        let reference = map(&[(1994, 1000.0), (1995, 1100.0)]);
        let source = map(&[(1993, 450.0), (1994, 500.0)]);
        let f = calibrate_overlap(&reference, &source, &Overlap::Years(vec![1994])).unwrap();
        assert_eq!(f.factor, 2.0);
        assert_eq!(f.max_discontinuity, 0.0);
        assert!(!f.flagged);
        assert_eq!(f.apply(450.0), 900.0);
        let all = calibrate_overlap(&reference, &source, &Overlap::Years(vec![])).unwrap();
        assert_eq!(all, f);
    }

    #[test]
    fn splice_mean_ratio_and_flag() {
        let reference = map(&[(1, 10.0), (2, 30.0)]);
        let source = map(&[(1, 10.0), (2, 10.0)]);
        let f = calibrate_overlap(&reference, &source, &Overlap::Years(vec![1, 2])).unwrap();
        assert_eq!(f.factor, 2.0);
        assert_eq!(f.max_discontinuity, 1.0);
        assert!(f.flagged);
    }

    #[test]
    fn splice_examples() {
        let same = map(&[(1, 3.0), (2, 4.0)]);
        let f = calibrate_overlap(&same, &same, &Overlap::Years(vec![])).unwrap();
        assert_eq!(f.factor, 1.0);
        let a = map(&[(5, 200.0)]);
        let b = map(&[(4, 50.0), (5, 100.0)]);
        let f = calibrate_overlap(&a, &b, &Overlap::Years(vec![5])).unwrap();
        assert_eq!(f.factor, 2.0);
        assert_eq!(f.apply(50.0), 100.0);
        let a = map(&[(1, 2.0), (2, 2.2)]);
        let b = map(&[(1, 1.0), (2, 1.0)]);
        let f = calibrate_overlap(&a, &b, &Overlap::Years(vec![1, 2])).unwrap();
        assert!((f.factor - 2.1).abs() < 1e-15);
        assert!((f.max_discontinuity - 0.05).abs() < 1e-12);
        assert!(!f.flagged);
    }

    #[test]
    fn splice_adjacent() {
        let reference = map(&[(1980, 300.0)]);
        let source = map(&[(1979, 100.0)]);
        let o = Overlap::Adjacent {
            reference_year: 1980,
            source_year: 1979,
        };
        let f = calibrate_overlap(&reference, &source, &o).unwrap();
        assert_eq!(f.factor, 3.0);
        assert_eq!(f.years, vec![1979]);
    }

    #[test]
    fn splice_errors() {
        let reference = map(&[(1, 1.0)]);
        let source = map(&[(2, 1.0)]);
        assert!(matches!(
            calibrate_overlap(&reference, &source, &Overlap::Years(vec![])),
            Err(PanelError::NoOverlap(_))
        ));
        let source = map(&[(1, 0.0)]);
        assert_eq!(
            calibrate_overlap(&reference, &source, &Overlap::Years(vec![1])),
            Err(PanelError::ZeroDenominator(1))
        );
    }

    #[test]
    fn ratio_example() {
        let reference = map(&[(1, 100.0), (2, 110.0), (3, 120.0)]);
        let target = map(&[(1, 50.0)]);
        let fill = fixed_ratio_impute(&target, &reference, &[1], None).unwrap();
        assert_eq!(fill.ratio, 0.5);
        assert_eq!(fill.filled, map(&[(2, 55.0), (3, 60.0)]));
    }

    #[test]
    fn ratio_keeps_observed_and_checks_range() {
        let reference = map(&[(1, 100.0), (2, 110.0), (4, 130.0)]);
        let target = map(&[(1, 50.0), (2, 99.0)]);
        let fill = fixed_ratio_impute(&target, &reference, &[1], Some((1, 2))).unwrap();
        assert!(fill.filled.is_empty());
        assert_eq!(
            fixed_ratio_impute(&target, &reference, &[1], Some((1, 3))),
            Err(PanelError::ReferenceGap(3))
        );
        assert_eq!(
            fixed_ratio_impute(&target, &reference, &[4], None),
            Err(PanelError::NoAnchor(4))
        );
    }

    #[test]
    fn interpolation() {
        let obs = map(&[(1990, 10.0), (1994, 30.0)]);
        let filled = interpolate_linear(&obs, None).unwrap();
        assert_eq!(filled, map(&[(1991, 15.0), (1992, 20.0), (1993, 25.0)]));
        assert_eq!(
            interpolate_linear(&obs, Some((1989, 1994))),
            Err(PanelError::ExtrapolationRequired(1989))
        );
        assert_eq!(interpolate_linear(&map(&[(1, 1.0)]), None), Err(PanelError::TooFewPoints(1)));
        let mid = interpolate_linear(&map(&[(1970, 100.0), (1974, 200.0)]), None).unwrap();
        assert_eq!(mid[&1972], 150.0);
        assert!(interpolate_linear(&map(&[(1970, 100.0), (1971, 0.0)]), None)
            .unwrap()
            .is_empty());
        let part = interpolate_linear(&obs, Some((1990, 1992))).unwrap();
        assert_eq!(part.keys().copied().collect::<Vec<_>>(), vec![1991, 1992]);
    }

    #[test]
    fn allocation_shares() {
        let total = map(&[(1970, 100.0), (1972, 90.0)]);
        let east = map(&[(1971, 30.0), (1973, 10.0)]);
        let west = map(&[(1971, 10.0), (1973, 10.0)]);
        let a = allocate_directional(&total, &east, &west).unwrap();
        assert_eq!(a.len(), 2);
        assert_eq!((a[0].reference_year, a[0].eastbound, a[0].westbound), (1971, 75.0, 25.0));
        // equidistant: later reference year
        assert_eq!((a[1].reference_year, a[1].eastbound, a[1].westbound), (1973, 45.0, 45.0));
        for x in &a {
            assert_eq!(x.eastbound + x.westbound, total[&x.year]);
        }
        let west0 = map(&[(1971, 0.0)]);
        assert_eq!(
            allocate_directional(&total, &map(&[(1971, 1.0)]), &west0),
            Err(PanelError::ZeroReference)
        );
    }
}
