//! Array-level spectral statistics: emission uniformity over a quantum-dot
//! array and discovery of dot pairs emitting within an energy threshold.

use alloc::string::String;
use alloc::vec::Vec;
use thiserror::Error;

use crate::numeric::{mean_std, sampling};
use crate::units::{wavelength_to_energy, Wavelength};

#[derive(Debug, Error, PartialEq)]
pub enum ArrayMapError {
    #[error("duplicate array position ({0}, {1})")]
    DuplicatePosition(u32, u32),
    #[error("uniformity statistics need at least 2 entries, got {0}")]
    TooFewEntries(usize),
    #[error("pair threshold must be positive")]
    NonPositiveThreshold,
}

/// One emitter in the array.
#[derive(Debug, Clone, PartialEq)]
pub struct QdEntry {
    pub row: u32,
    pub col: u32,
    pub wavelength: Wavelength,
    pub label: Option<String>,
}

/// Emission-wavelength map of a rows×cols emitter array.
#[derive(Debug, Clone, PartialEq)]
pub struct QdArrayMap {
    entries: Vec<QdEntry>,
    pub rows: u32,
    pub cols: u32,
}

impl QdArrayMap {
    pub fn new(entries: Vec<QdEntry>, rows: u32, cols: u32) -> Result<Self, ArrayMapError> {
        for (i, a) in entries.iter().enumerate() {
            for b in &entries[i + 1..] {
                if a.row == b.row && a.col == b.col {
                    return Err(ArrayMapError::DuplicatePosition(a.row, a.col));
                }
            }
        }
        Ok(Self {
            entries,
            rows,
            cols,
        })
    }

    pub fn entries(&self) -> &[QdEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Mean/spread of the array emission, in both wavelength and energy.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformityStats {
    pub mean_nm: f64,
    pub std_nm: f64,
    pub mean_ev: f64,
    pub std_ev: f64,
    pub min_nm: f64,
    pub max_nm: f64,
}

/// Sample mean and standard deviation (n−1) of the emission map.
pub fn uniformity_stats(map: &QdArrayMap) -> Result<UniformityStats, ArrayMapError> {
    if map.len() < 2 {
        return Err(ArrayMapError::TooFewEntries(map.len()));
    }
    let nm: Vec<f64> = map.entries().iter().map(|e| e.wavelength.as_nm()).collect();
    let ev: Vec<f64> = map
        .entries()
        .iter()
        .map(|e| wavelength_to_energy(e.wavelength).as_ev())
        .collect();
    let (mean_nm, std_nm) = mean_std(&nm);
    let (mean_ev, std_ev) = mean_std(&ev);
    let min_nm = nm.iter().copied().fold(f64::INFINITY, f64::min);
    let max_nm = nm.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(UniformityStats {
        mean_nm,
        std_nm,
        mean_ev,
        std_ev,
        min_nm,
        max_nm,
    })
}

/// One matched pair: the two positions and their energy separation in eV.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchedPair {
    pub a: (u32, u32),
    pub b: (u32, u32),
    pub de_ev: f64,
}

/// All unordered pairs within `threshold`, sorted ascending by separation.
#[derive(Debug, Clone, PartialEq)]
pub struct PairReport {
    pub pairs: Vec<MatchedPair>,
    pub threshold_ev: f64,
}

/// Finds every unordered pair of emitters separated by at most `threshold_ev`
/// in photon energy. Matching is done in energy, not wavelength.
pub fn find_pairs(map: &QdArrayMap, threshold_ev: f64) -> Result<PairReport, ArrayMapError> {
    if !(threshold_ev > 0.0) && threshold_ev != 0.0 {
        return Err(ArrayMapError::NonPositiveThreshold);
    }
    let ev: Vec<f64> = map
        .entries()
        .iter()
        .map(|e| wavelength_to_energy(e.wavelength).as_ev())
        .collect();
    let mut pairs = Vec::new();
    for i in 0..map.len() {
        for j in i + 1..map.len() {
            let de = libm::fabs(ev[i] - ev[j]);
            if de <= threshold_ev {
                let (ea, eb) = (&map.entries()[i], &map.entries()[j]);
                pairs.push(MatchedPair {
                    a: (ea.row, ea.col),
                    b: (eb.row, eb.col),
                    de_ev: de,
                });
            }
        }
    }
    pairs.sort_by(|p, q| {
        p.de_ev
            .total_cmp(&q.de_ev)
            .then(p.a.cmp(&q.a))
            .then(p.b.cmp(&q.b))
    });
    Ok(PairReport {
        pairs,
        threshold_ev,
    })
}

/// Synthetic rows×cols fixture with normally distributed emission
/// wavelengths, for exercising the statistics without measured data.
pub fn synthetic_map(rows: u32, cols: u32, mean_nm: f64, std_nm: f64, seed: u64) -> QdArrayMap {
    let mut rng = sampling::stream_rng(seed, 0);
    let mut entries = Vec::with_capacity((rows * cols) as usize);
    for r in 0..rows {
        for c in 0..cols {
            let mut nm = mean_nm + std_nm * sampling::standard_normal(&mut rng);
            if nm <= 0.0 {
                nm = mean_nm; // pathological inputs only
            }
            entries.push(QdEntry {
                row: r,
                col: c,
                wavelength: Wavelength::from_nm(nm).expect("positive by construction"),
                label: None,
            });
        }
    }
    QdArrayMap::new(entries, rows, cols).expect("positions unique by construction")
}
