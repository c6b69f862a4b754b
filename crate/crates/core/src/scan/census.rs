//! Hasse-failure census over `[1, K]` in fixed-width chunks, with resumable checkpoints.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::classify::{exceptional_sieve, is_admissible, shape_labels, Obstruction};
use crate::error::{MarkoffError, Result};
use crate::scan::sweep::sweep_counts_range;

pub const DEFAULT_CHUNK_WIDTH: u64 = 100_800;
pub const CHECKPOINT_VERSION: u32 = 1;
/// Moduli for the congruence split of the Hasse failures.
pub const CLASS_MODULI: [u64; 3] = [3, 4, 9];

/// Counters for one chunk `[lo, hi]`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChunkResult {
    pub id: u64,
    pub lo: u64,
    pub hi: u64,
    /// Admissible levels among 1..=4 (1, 2 and 4).
    pub special_admissible: u64,
    pub admissible: u64,
    pub exceptional: u64,
    pub generic: u64,
    pub hf: u64,
    pub hf_by_class: BTreeMap<u64, Vec<u64>>,
    pub h_histogram: BTreeMap<u64, u64>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChunkSubtotal {
    pub id: u64,
    pub lo: u64,
    pub hi: u64,
    pub admissible: u64,
    pub hf: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusAggregate {
    pub k_min: u64,
    pub k_max: u64,
    pub chunk_width: u64,
    /// Admissible `k` among 1, 2 and 4 inside the range; counted in the percentage denominator only.
    pub special_admissible: u64,
    /// Admissible `k >= 5` in the range.
    pub admissible_count: u64,
    pub exceptional_count: u64,
    pub generic_count: u64,
    pub hf_count: u64,
    /// modulus -> Hasse-failure count per residue
    pub hf_by_class: BTreeMap<u64, Vec<u64>>,
    /// h -> number of generic `k` with that class number
    pub h_histogram: BTreeMap<u64, u64>,
    pub chunks: Vec<ChunkSubtotal>,
}

impl CensusAggregate {
    /// `A(K)`: admissible levels in `[1, K]`.
    pub fn admissible_total(&self) -> u64 {
        self.admissible_count + self.special_admissible
    }

    /// `100 A_HF(K) / A(K)`.
    pub fn hf_percent(&self) -> f64 {
        100.0 * self.hf_count as f64 / self.admissible_total() as f64
    }

    /// Share of Hasse failures in residue class `r` mod `m`, in percent.
    pub fn class_percent(&self, m: u64, r: u64) -> Option<f64> {
        let c = self.hf_by_class.get(&m)?.get(r as usize)?;
        Some(100.0 * *c as f64 / self.hf_count as f64)
    }

    /// `(K', A_HF(K'), A(K'), percent)` at each chunk end.
    pub fn cumulative(&self) -> Vec<SeriesPoint> {
        let (mut hf, mut adm) = (0, 0);
        let mut out = Vec::with_capacity(self.chunks.len());
        for c in &self.chunks {
            hf += c.hf;
            adm += c.admissible;
            // chunk 0 also carries the special levels
            let total = adm + self.special_admissible;
            out.push(SeriesPoint { k: c.hi, hf, admissible: total, percent: 100.0 * hf as f64 / total as f64 });
        }
        out
    }

    /// The cumulative series restricted to `points`; points that are not chunk ends are skipped.
    pub fn percent_series(&self, points: &[u64]) -> Vec<SeriesPoint> {
        self.cumulative().into_iter().filter(|p| points.contains(&p.k)).collect()
    }

    fn check(&self) {
        debug_assert_eq!(self.admissible_count, self.generic_count + self.exceptional_count);
        debug_assert_eq!(self.h_histogram.values().sum::<u64>(), self.generic_count);
        debug_assert_eq!(self.h_histogram.get(&0).copied().unwrap_or(0), self.hf_count);
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub k: u64,
    pub hf: u64,
    pub admissible: u64,
    pub percent: f64,
}

/// Sample points for percent tables: the published ones inside `[1, K]`,
/// falling back to decade multiples of the chunk width.
pub fn default_sample_points(k_max: u64, chunk_width: u64) -> Vec<u64> {
    let mut pts: Vec<u64> = [100_800u64]
        .into_iter()
        .chain((1..=55).map(|i| i * 10_080_000))
        .chain((1..=75).map(|i| i * 6_552_000))
        .filter(|&k| k <= k_max && k % chunk_width == 0)
        .collect();
    if pts.is_empty() {
        let mut m = chunk_width;
        while m <= k_max {
            pts.push(m);
            m *= 10;
        }
    }
    pts.sort();
    pts.dedup();
    pts
}

/// What the census needs to know about one level.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LevelKind {
    NonAdmissible(Obstruction),
    /// 1, 2 and 4
    Special,
    /// Sieve bits, as in [`exceptional_sieve`].
    Exceptional(u8),
    /// Plus-box count.
    Generic(u32),
}

/// Calls `f(k, kind)` for every `k` in `[lo, hi]`, `lo >= 1`.
pub fn scan_levels(lo: u64, hi: u64, mut f: impl FnMut(u64, LevelKind)) {
    let marks = exceptional_sieve(lo, hi);
    let counts = sweep_counts_range(lo, hi);
    for k in lo..=hi {
        let i = (k - lo) as usize;
        let kind = match is_admissible(k as i64) {
            Some(o) => LevelKind::NonAdmissible(o),
            None if k <= 4 => LevelKind::Special,
            None if marks[i] != 0 => LevelKind::Exceptional(marks[i]),
            None => LevelKind::Generic(counts[i]),
        };
        f(k, kind);
    }
}

/// One line of a scan listing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelRow {
    pub k: u64,
    pub verdict: String,
    /// Class number; empty for exceptional and non-admissible levels, and for 4.
    pub h: Option<u64>,
    pub hasse_failure: bool,
}

/// Per-level rows for `[lo, hi]`, labelled like [`crate::classify::Verdict`].
pub fn level_rows(lo: u64, hi: u64) -> Vec<LevelRow> {
    let mut out = Vec::with_capacity((hi + 1 - lo) as usize);
    scan_levels(lo, hi, |k, kind| {
        let (verdict, h) = match kind {
            LevelKind::NonAdmissible(o) => (format!("NonAdmissible({o:?})"), None),
            LevelKind::Special => {
                let h = crate::point::special_reps(k as i64).map(|r| r.len() as u64);
                ("Special".to_string(), h)
            }
            LevelKind::Exceptional(b) => (format!("Exceptional({})", shape_labels(b).join("+")), None),
            LevelKind::Generic(h) => ("Generic".to_string(), Some(h as u64)),
        };
        let hasse_failure = kind == LevelKind::Generic(0);
        out.push(LevelRow { k, verdict, h, hasse_failure });
    });
    out
}

/// Census of the chunk `[lo, hi]`.
pub fn census_chunk(id: u64, lo: u64, hi: u64) -> ChunkResult {
    let mut r = ChunkResult { id, lo, hi, ..Default::default() };
    for m in CLASS_MODULI {
        r.hf_by_class.insert(m, vec![0; m as usize]);
    }
    scan_levels(lo, hi, |k, kind| match kind {
        LevelKind::NonAdmissible(_) => {}
        LevelKind::Special => r.special_admissible += 1,
        LevelKind::Exceptional(_) => {
            r.admissible += 1;
            r.exceptional += 1;
        }
        LevelKind::Generic(h) => {
            r.admissible += 1;
            r.generic += 1;
            *r.h_histogram.entry(h as u64).or_default() += 1;
            if h == 0 {
                r.hf += 1;
                for (m, v) in r.hf_by_class.iter_mut() {
                    v[(k % m) as usize] += 1;
                }
            }
        }
    });
    r
}

/// Chunk `id` of `[k_min, k_max]`.
pub fn chunk_bounds(k_min: u64, k_max: u64, width: u64, id: u64) -> (u64, u64) {
    let lo = k_min + id * width;
    (lo, (lo + width - 1).min(k_max))
}

pub fn chunk_count(k_min: u64, k_max: u64, width: u64) -> u64 {
    (k_max + 1 - k_min).div_ceil(width)
}

/// Merges chunk results in id order. `k_min` is taken from the lowest chunk.
pub fn merge_chunks(k_max: u64, width: u64, chunks: &[ChunkResult]) -> CensusAggregate {
    let mut sorted: Vec<&ChunkResult> = chunks.iter().collect();
    sorted.sort_by_key(|c| c.id);
    let k_min = sorted.first().map_or(1, |c| c.lo);
    let mut agg = CensusAggregate { k_min, k_max, chunk_width: width, ..Default::default() };
    for m in CLASS_MODULI {
        agg.hf_by_class.insert(m, vec![0; m as usize]);
    }
    for c in sorted {
        agg.special_admissible += c.special_admissible;
        agg.admissible_count += c.admissible;
        agg.exceptional_count += c.exceptional;
        agg.generic_count += c.generic;
        agg.hf_count += c.hf;
        for (m, v) in &c.hf_by_class {
            let dst = agg.hf_by_class.entry(*m).or_insert_with(|| vec![0; v.len()]);
            for (d, s) in dst.iter_mut().zip(v) {
                *d += s;
            }
        }
        for (h, n) in &c.h_histogram {
            *agg.h_histogram.entry(*h).or_default() += n;
        }
        agg.chunks.push(ChunkSubtotal { id: c.id, lo: c.lo, hi: c.hi, admissible: c.admissible, hf: c.hf });
    }
    agg.check();
    agg
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanCheckpoint {
    pub version: u32,
    pub tool_version: String,
    /// Free-form record of the flags that started the run.
    pub flags: String,
    pub k_min: u64,
    pub k_max: u64,
    pub chunk_width: u64,
    pub completed: Vec<ChunkResult>,
    /// SHA-256 over the JSON of every other field.
    pub checksum: String,
}

#[derive(Serialize)]
struct CheckpointPayload<'a> {
    version: u32,
    tool_version: &'a str,
    flags: &'a str,
    k_min: u64,
    k_max: u64,
    chunk_width: u64,
    completed: &'a [ChunkResult],
}

impl ScanCheckpoint {
    fn payload_hash(&self) -> String {
        let payload = CheckpointPayload {
            version: self.version,
            tool_version: &self.tool_version,
            flags: &self.flags,
            k_min: self.k_min,
            k_max: self.k_max,
            chunk_width: self.chunk_width,
            completed: &self.completed,
        };
        let bytes = serde_json::to_vec(&payload).expect("checkpoint payload serializes");
        hex::encode(Sha256::digest(&bytes))
    }

    pub fn new(k_min: u64, k_max: u64, chunk_width: u64, flags: &str, mut completed: Vec<ChunkResult>) -> Self {
        completed.sort_by_key(|c| c.id);
        let mut cp = ScanCheckpoint {
            version: CHECKPOINT_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            flags: flags.to_string(),
            k_min,
            k_max,
            chunk_width,
            completed,
            checksum: String::new(),
        };
        cp.checksum = cp.payload_hash();
        cp
    }

    pub fn verify(&self) -> Result<()> {
        if self.version != CHECKPOINT_VERSION {
            return Err(MarkoffError::Checkpoint(format!("unsupported version {}", self.version)));
        }
        if self.payload_hash() != self.checksum {
            return Err(MarkoffError::Checkpoint("checksum mismatch".into()));
        }
        Ok(())
    }

    /// Writes to a sibling temporary file, then renames over `path`.
    pub fn save(&self, path: &Path) -> Result<()> {
        let io = |e: std::io::Error| MarkoffError::Checkpoint(e.to_string());
        let mut tmp = path.as_os_str().to_owned();
        tmp.push(".tmp");
        let tmp = PathBuf::from(tmp);
        let text = serde_json::to_string_pretty(self).map_err(|e| MarkoffError::Checkpoint(e.to_string()))?;
        fs::write(&tmp, text + "\n").map_err(io)?;
        fs::rename(&tmp, path).map_err(io)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| MarkoffError::Checkpoint(e.to_string()))?;
        let cp: ScanCheckpoint = serde_json::from_str(&text).map_err(|e| MarkoffError::Checkpoint(e.to_string()))?;
        cp.verify()?;
        Ok(cp)
    }
}

#[derive(Clone, Debug)]
pub struct CensusOptions {
    /// Lower end of the range; the census covers `[k_min, K]`.
    pub k_min: u64,
    pub chunk_width: u64,
    pub checkpoint: Option<PathBuf>,
    /// Continue from an existing checkpoint file if there is one.
    pub resume: bool,
    /// Stop after this many newly computed chunks (the run is then incomplete).
    pub max_new_chunks: Option<u64>,
    /// Chunks computed between checkpoint writes.
    pub batch: u64,
    pub flags: String,
}

impl Default for CensusOptions {
    fn default() -> Self {
        CensusOptions {
            k_min: 1,
            chunk_width: DEFAULT_CHUNK_WIDTH,
            checkpoint: None,
            resume: false,
            max_new_chunks: None,
            batch: 64,
            flags: String::new(),
        }
    }
}

/// Outcome of [`census_with`]: the aggregate when every chunk is done.
#[derive(Clone, Debug)]
pub enum CensusRun {
    Complete(CensusAggregate),
    Interrupted { done: u64, total: u64 },
}

pub fn census(k_max: u64) -> Result<CensusAggregate> {
    match census_with(k_max, &CensusOptions::default())? {
        CensusRun::Complete(a) => Ok(a),
        CensusRun::Interrupted { .. } => unreachable!("no chunk limit was set"),
    }
}

pub fn census_with(k_max: u64, opts: &CensusOptions) -> Result<CensusRun> {
    let k_min = opts.k_min;
    if k_min == 0 || k_min > k_max {
        return Err(MarkoffError::ConfigViolation(format!("empty or non-positive range [{k_min}, {k_max}]")));
    }
    if opts.chunk_width == 0 {
        return Err(MarkoffError::ConfigViolation("chunk width must be positive".into()));
    }
    let width = opts.chunk_width;
    let total = chunk_count(k_min, k_max, width);
    let mut done: Vec<ChunkResult> = Vec::new();
    if let (true, Some(path)) = (opts.resume, &opts.checkpoint) {
        if path.exists() {
            let cp = ScanCheckpoint::load(path)?;
            if (cp.k_min, cp.k_max, cp.chunk_width) != (k_min, k_max, width) {
                return Err(MarkoffError::Checkpoint(format!(
                    "checkpoint is for [{}, {}] with width {}, not [{k_min}, {k_max}] with width {width}",
                    cp.k_min, cp.k_max, cp.chunk_width
                )));
            }
            done = cp.completed;
        }
    }
    let have: std::collections::HashSet<u64> = done.iter().map(|c| c.id).collect();
    let mut todo: Vec<u64> = (0..total).filter(|id| !have.contains(id)).collect();
    if let Some(n) = opts.max_new_chunks {
        todo.truncate(n as usize);
    }
    for batch in todo.chunks(opts.batch.max(1) as usize) {
        let results: Vec<ChunkResult> = batch
            .par_iter()
            .map(|&id| {
                let (lo, hi) = chunk_bounds(k_min, k_max, width, id);
                census_chunk(id, lo, hi)
            })
            .collect();
        done.extend(results);
        if let Some(path) = &opts.checkpoint {
            ScanCheckpoint::new(k_min, k_max, width, &opts.flags, done.clone()).save(path)?;
        }
    }
    if (done.len() as u64) < total {
        return Ok(CensusRun::Interrupted { done: done.len() as u64, total });
    }
    Ok(CensusRun::Complete(merge_chunks(k_max, width, &done)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{sieve_classify_range, ClassifyOptions, Verdict};

    #[test]
    fn chunk_matches_sieve_classification() {
        let recs = sieve_classify_range(1, 3000, &ClassifyOptions::default()).unwrap();
        let agg = merge_chunks(3000, 3000, &[census_chunk(0, 1, 3000)]);
        let hf = recs.iter().filter(|r| r.hasse_failure).count() as u64;
        let gen = recs.iter().filter(|r| r.verdict == Verdict::Generic).count() as u64;
        assert_eq!(agg.hf_count, hf);
        assert_eq!(agg.generic_count, gen);
        assert_eq!(agg.special_admissible, 3);
    }

    #[test]
    fn chunk_width_does_not_matter() {
        let one = census_with(20_000, &CensusOptions { chunk_width: 20_000, ..Default::default() }).unwrap();
        let many = census_with(20_000, &CensusOptions { chunk_width: 313, ..Default::default() }).unwrap();
        let (CensusRun::Complete(a), CensusRun::Complete(b)) = (one, many) else { panic!() };
        assert_eq!(a.hf_count, b.hf_count);
        assert_eq!(a.h_histogram, b.h_histogram);
        assert_eq!(a.hf_by_class, b.hf_by_class);
        assert_eq!(a.admissible_total(), b.admissible_total());
    }

    #[test]
    fn rows_agree_with_chunk_counts() {
        let rows = level_rows(1, 5000);
        let c = census_chunk(0, 1, 5000);
        assert_eq!(rows.iter().filter(|r| r.hasse_failure).count() as u64, c.hf);
        assert_eq!(rows.iter().filter(|r| r.verdict == "Generic").count() as u64, c.generic);
        assert_eq!(rows[45].verdict, "Generic");
        assert!(rows[45].hasse_failure);
        assert_eq!(rows[2].verdict, "NonAdmissible(Mod4)");
        assert_eq!(rows[4].verdict, "Exceptional(SumTwoSquares+FourKminus1Form+KMinus4Square)");
        assert_eq!(rows[328].h, Some(2));
    }

    #[test]
    fn offset_range_matches_full_run() {
        let opts = CensusOptions { k_min: 2001, chunk_width: 700, ..Default::default() };
        let CensusRun::Complete(a) = census_with(9000, &opts).unwrap() else { panic!() };
        let b = merge_chunks(9000, 7000, &[census_chunk(0, 2001, 9000)]);
        assert_eq!((a.k_min, a.hf_count, &a.h_histogram), (2001, b.hf_count, &b.h_histogram));
        assert_eq!(a.chunks.last().unwrap().hi, 9000);
    }

    #[test]
    fn checkpoint_checksum_detects_edits() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cp.json");
        let cp = ScanCheckpoint::new(1, 1000, 500, "test", vec![census_chunk(0, 1, 500)]);
        cp.save(&path).unwrap();
        assert_eq!(ScanCheckpoint::load(&path).unwrap(), cp);
        let text = fs::read_to_string(&path).unwrap().replace("\"hf\": ", "\"hf\": 1");
        fs::write(&path, text).unwrap();
        assert!(ScanCheckpoint::load(&path).is_err());
    }
}
