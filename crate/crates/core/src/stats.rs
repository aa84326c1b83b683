//! Per-class statistics and cross-classification agreement.
//!
//! Percentages are carried at full f64 precision and rounded to two decimals
//! only at the export boundary. Tallies reduce over row partitions with
//! integer counters, so partitioning cannot change any result.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::{Class, ClassRaster, ThresholdSet};
use crate::error::{Error, Result};
use crate::indices::{IndexKind, IndexRaster};
use crate::raster::check_coregistered;

/// Counts and percentages for one classified raster.
///
/// `counts[i]` belongs to class code `i + 1`; `pct_veg_subdivision` covers
/// stress, moderate and dense as shares of the vegetation total.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassStats {
    pub total_valid: u64,
    pub counts: [u64; 4],
    pub pct_of_total: [f64; 4],
    pub veg_total: u64,
    pub pct_veg_subdivision: [f64; 3],
    pub index_min: f32,
    pub index_max: f32,
}

impl ClassStats {
    /// Derives every percentage from the raw counts. All percentage fields
    /// everywhere in the crate flow through here.
    pub fn from_counts(counts: [u64; 4], index_min: f32, index_max: f32) -> Result<Self> {
        let total_valid: u64 = counts.iter().sum();
        if total_valid == 0 {
            return Err(Error::AllNodata);
        }
        let veg_total: u64 = counts[1..].iter().sum();
        let pct = |c: u64, total: u64| {
            if total == 0 {
                0.0
            } else {
                100.0 * c as f64 / total as f64
            }
        };
        Ok(ClassStats {
            total_valid,
            counts,
            pct_of_total: counts.map(|c| pct(c, total_valid)),
            veg_total,
            pct_veg_subdivision: [
                pct(counts[1], veg_total),
                pct(counts[2], veg_total),
                pct(counts[3], veg_total),
            ],
            index_min,
            index_max,
        })
    }

    pub fn count(&self, class: Class) -> u64 {
        self.counts[class.code() as usize - 1]
    }
}

/// Rounding used by every JSON/CSV export of a percentage.
pub fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

/// Tallies a class raster against the index raster it came from.
pub fn compute_stats(classes: &ClassRaster, index: &IndexRaster) -> Result<ClassStats> {
    check_coregistered(classes.grid(), index.grid())?;
    let counts = classes
        .codes()
        .par_chunks(classes.width().max(1))
        .fold(
            || [0u64; 5],
            |mut acc, row| {
                for &c in row {
                    acc[c as usize] += 1;
                }
                acc
            },
        )
        .reduce(
            || [0u64; 5],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b.iter()) {
                    *x += y;
                }
                a
            },
        );
    let (min, max) = index
        .values()
        .par_chunks(index.grid().width().max(1))
        .fold(
            || (f32::INFINITY, f32::NEG_INFINITY),
            |(mut lo, mut hi), row| {
                for &v in row {
                    if !index.is_nodata(v) {
                        lo = lo.min(v);
                        hi = hi.max(v);
                    }
                }
                (lo, hi)
            },
        )
        .reduce(
            || (f32::INFINITY, f32::NEG_INFINITY),
            |a, b| (a.0.min(b.0), a.1.max(b.1)),
        );
    ClassStats::from_counts([counts[1], counts[2], counts[3], counts[4]], min, max)
}

/// Confusion matrix between two classifications of the same scene, with
/// overall agreement and Cohen's kappa. Rows index the classes of `a`,
/// columns the classes of `b`; pixels nodata in either raster are excluded.
#[derive(Debug, Clone, PartialEq)]
pub struct AgreementReport {
    pub matrix: [[u64; 4]; 4],
    pub overall_agreement: f64,
    pub kappa: f64,
    pub total_compared: u64,
}

pub fn compare_classifications(a: &ClassRaster, b: &ClassRaster) -> Result<AgreementReport> {
    check_coregistered(a.grid(), b.grid())?;
    let width = a.width().max(1);
    let matrix = a
        .codes()
        .par_chunks(width)
        .zip(b.codes().par_chunks(width))
        .fold(
            || [[0u64; 4]; 4],
            |mut acc, (ra, rb)| {
                for (&ca, &cb) in ra.iter().zip(rb.iter()) {
                    if ca != 0 && cb != 0 {
                        acc[ca as usize - 1][cb as usize - 1] += 1;
                    }
                }
                acc
            },
        )
        .reduce(
            || [[0u64; 4]; 4],
            |mut m, n| {
                for (row_m, row_n) in m.iter_mut().zip(n.iter()) {
                    for (x, y) in row_m.iter_mut().zip(row_n.iter()) {
                        *x += y;
                    }
                }
                m
            },
        );

    let total: u64 = matrix.iter().flatten().sum();
    if total == 0 {
        return Err(Error::NoOverlap);
    }
    let n = total as f64;
    let trace: u64 = (0..4).map(|i| matrix[i][i]).sum();
    let p_o = trace as f64 / n;

    let mut p_e = 0.0;
    for (k, row) in matrix.iter().enumerate() {
        let row_total: u64 = row.iter().sum();
        let col_total: u64 = matrix.iter().map(|r| r[k]).sum();
        p_e += (row_total as f64 / n) * (col_total as f64 / n);
    }
    // p_e reaches 1 only when both rasters are constant on the same class,
    // which forces perfect agreement.
    let kappa = if p_e >= 1.0 {
        1.0
    } else {
        (p_o - p_e) / (1.0 - p_e)
    };

    Ok(AgreementReport {
        matrix,
        overall_agreement: p_o,
        kappa,
        total_compared: total,
    })
}

// ---------------------------------------------------------------------------
// Exports

#[derive(Serialize, Deserialize)]
struct ClassEntryJson {
    count: u64,
    pct: f64,
}

#[derive(Serialize, Deserialize)]
struct ClassesJson {
    non_vegetation: ClassEntryJson,
    stress: ClassEntryJson,
    moderate: ClassEntryJson,
    dense: ClassEntryJson,
}

#[derive(Serialize, Deserialize)]
struct VegSubdivisionJson {
    stress_pct: f64,
    moderate_pct: f64,
    dense_pct: f64,
}

#[derive(Serialize, Deserialize)]
struct StatsJson {
    index: String,
    min: f32,
    max: f32,
    total_valid: u64,
    classes: ClassesJson,
    vegetation_subdivision: VegSubdivisionJson,
}

impl ClassStats {
    /// Stats JSON document, percentages rounded to two decimals.
    pub fn to_json(&self, kind: IndexKind) -> String {
        let entry = |i: usize| ClassEntryJson {
            count: self.counts[i],
            pct: round2(self.pct_of_total[i]),
        };
        let doc = StatsJson {
            index: kind.name().to_string(),
            min: self.index_min,
            max: self.index_max,
            total_valid: self.total_valid,
            classes: ClassesJson {
                non_vegetation: entry(0),
                stress: entry(1),
                moderate: entry(2),
                dense: entry(3),
            },
            vegetation_subdivision: VegSubdivisionJson {
                stress_pct: round2(self.pct_veg_subdivision[0]),
                moderate_pct: round2(self.pct_veg_subdivision[1]),
                dense_pct: round2(self.pct_veg_subdivision[2]),
            },
        };
        let mut out = serde_json::to_string_pretty(&doc).expect("stats serialize");
        out.push('\n');
        out
    }

    /// Rebuilds stats from an exported JSON document. Percentages are
    /// recomputed from the counts, so no rounding is ever re-ingested.
    pub fn from_json_str(text: &str) -> Result<(Self, String)> {
        let doc: StatsJson = serde_json::from_str(text).map_err(|e| Error::Parse {
            what: "stats JSON".into(),
            detail: e.to_string(),
        })?;
        let stats = ClassStats::from_counts(
            [
                doc.classes.non_vegetation.count,
                doc.classes.stress.count,
                doc.classes.moderate.count,
                doc.classes.dense.count,
            ],
            doc.min,
            doc.max,
        )?;
        Ok((stats, doc.index))
    }

    /// Two-section CSV mirroring the vegetation/non-vegetation split and the
    /// vegetation subdivision, one row per section.
    pub fn to_csv(&self, kind: IndexKind, thresholds: ThresholdSet) -> String {
        let ThresholdSet { t0, t1, t2 } = thresholds;
        let name = kind.name();
        let veg_pct: f64 = self.pct_of_total[1..].iter().sum();
        let mut out = String::new();
        out.push_str(
            "index,minimum,maximum,non_vegetation_range,non_vegetation_pct,vegetation_range,vegetation_pct\n",
        );
        out.push_str(&format!(
            "{name},{},{},-1 <= v <= {t0},{:.2},{t0} < v <= 1,{:.2}\n",
            self.index_min,
            self.index_max,
            round2(self.pct_of_total[0]),
            round2(veg_pct),
        ));
        out.push_str(
            "index,stress_range,stress_pct,moderate_range,moderate_pct,dense_range,dense_pct\n",
        );
        out.push_str(&format!(
            "{name},{t0} < v <= {t1},{:.2},{t1} < v <= {t2},{:.2},{t2} < v <= 1,{:.2}\n",
            round2(self.pct_veg_subdivision[0]),
            round2(self.pct_veg_subdivision[1]),
            round2(self.pct_veg_subdivision[2]),
        ));
        out
    }
}

#[derive(Serialize, Deserialize)]
struct AgreementJson {
    matrix: [[u64; 4]; 4],
    overall_agreement: f64,
    kappa: f64,
    total_compared: u64,
}

impl AgreementReport {
    pub fn to_json(&self) -> String {
        let doc = AgreementJson {
            matrix: self.matrix,
            overall_agreement: self.overall_agreement,
            kappa: self.kappa,
            total_compared: self.total_compared,
        };
        let mut out = serde_json::to_string_pretty(&doc).expect("agreement serialize");
        out.push('\n');
        out
    }
}
