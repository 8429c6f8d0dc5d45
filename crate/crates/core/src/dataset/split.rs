use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Label, SegmentRecord, Split};
use crate::error::{ensure, Error, Result};

/// Class counts below this trigger a warning; the split is still produced.
const MIN_CLASS_SIZE: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitRatios(pub [u32; 3]);

impl Default for SplitRatios {
    fn default() -> Self {
        SplitRatios([8, 1, 1])
    }
}

impl FromStr for SplitRatios {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<_> = s.split(':').map(|p| p.trim().parse::<u32>()).collect();
        match parts.as_slice() {
            [Ok(a), Ok(b), Ok(c)] if a + b + c > 0 => Ok(SplitRatios([*a, *b, *c])),
            _ => Err(Error::invalid(format!(
                "ratios must look like 8:1:1 with a positive total, got '{s}'"
            ))),
        }
    }
}

impl fmt::Display for SplitRatios {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.0;
        write!(f, "{a}:{b}:{c}")
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SplitOptions {
    pub ratios: SplitRatios,
    pub seed: u64,
    /// Keep every segment of a recording in the same split.
    pub by_recording: bool,
}

/// Split segments plus the parameters that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub segments: Vec<SegmentRecord>,
    pub seed: u64,
    pub ratios: SplitRatios,
    pub by_recording: bool,
    pub warnings: Vec<String>,
}

impl Manifest {
    pub fn count(&self, label: Label, split: Split) -> usize {
        self.segments
            .iter()
            .filter(|s| s.label == label && s.split == Some(split))
            .count()
    }

    /// `counts[label][split]`, keyed by display names.
    pub fn counts(&self) -> BTreeMap<String, BTreeMap<String, usize>> {
        Label::ALL
            .iter()
            .map(|&l| {
                let per = Split::ALL
                    .iter()
                    .map(|&s| (s.name().to_string(), self.count(l, s)))
                    .collect();
                (l.name().to_string(), per)
            })
            .collect()
    }

    pub fn in_split(&self, split: Split) -> impl Iterator<Item = &SegmentRecord> {
        self.segments.iter().filter(move |s| s.split == Some(split))
    }
}

/// Largest-remainder apportionment of `n` items; ties go to the earlier split.
pub(crate) fn apportion(n: usize, ratios: SplitRatios) -> [usize; 3] {
    let total: u64 = ratios.0.iter().map(|&r| r as u64).sum();
    let mut counts = [0usize; 3];
    let mut rem = [(0u64, 0usize); 3];
    for i in 0..3 {
        let num = n as u64 * ratios.0[i] as u64;
        counts[i] = (num / total) as usize;
        rem[i] = (num % total, i);
    }
    let left = n - counts.iter().sum::<usize>();
    rem.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    for &(_, i) in rem.iter().take(left) {
        counts[i] += 1;
    }
    counts
}

fn class_rng(seed: u64, label: Label) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(label.index() as u64);
    rng
}

/// Stratified split: each class is shuffled under its own seeded stream and
/// apportioned separately, so every class keeps its share in every split.
pub fn split(segments: &[SegmentRecord], opts: SplitOptions) -> Result<Manifest> {
    ensure!(!segments.is_empty(), "nothing to split");
    let mut warnings = Vec::new();
    let mut out: Vec<SegmentRecord> = Vec::with_capacity(segments.len());

    for label in Label::ALL {
        let mut class: Vec<SegmentRecord> = segments
            .iter()
            .filter(|s| s.label == label)
            .cloned()
            .collect();
        if class.len() < MIN_CLASS_SIZE {
            warnings.push(format!(
                "class {label} has only {} segment(s); split proportions are degenerate",
                class.len()
            ));
        }
        class.sort_by(|a, b| a.segment_id.cmp(&b.segment_id));
        let mut rng = class_rng(opts.seed, label);
        if opts.by_recording {
            assign_by_recording(&mut class, opts.ratios, &mut rng);
        } else {
            class.shuffle(&mut rng);
            let counts = apportion(class.len(), opts.ratios);
            let mut idx = 0;
            for (split, &k) in Split::ALL.iter().zip(&counts) {
                for s in &mut class[idx..idx + k] {
                    s.split = Some(*split);
                }
                idx += k;
            }
        }
        out.extend(class);
    }
    out.sort_by(|a, b| a.segment_id.cmp(&b.segment_id));
    for w in out.windows(2) {
        ensure!(
            w[0].segment_id != w[1].segment_id,
            "duplicate segment id {}",
            w[0].segment_id
        );
    }
    Ok(Manifest {
        segments: out,
        seed: opts.seed,
        ratios: opts.ratios,
        by_recording: opts.by_recording,
        warnings,
    })
}

/// Whole recordings go to whichever split is furthest below its target.
fn assign_by_recording(class: &mut [SegmentRecord], ratios: SplitRatios, rng: &mut ChaCha8Rng) {
    let mut groups: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, s) in class.iter().enumerate() {
        groups.entry(s.recording_id.as_str()).or_default().push(i);
    }
    let mut groups: Vec<Vec<usize>> = groups.into_values().collect();
    groups.shuffle(rng);

    let total: f64 = ratios.0.iter().map(|&r| r as f64).sum();
    let targets: Vec<f64> = ratios
        .0
        .iter()
        .map(|&r| class.len() as f64 * r as f64 / total)
        .collect();
    let mut filled = [0usize; 3];
    let mut assignment = vec![Split::Train; class.len()];
    for g in groups {
        let mut best = 0;
        for i in 1..3 {
            if targets[i] - filled[i] as f64 > targets[best] - filled[best] as f64 {
                best = i;
            }
        }
        filled[best] += g.len();
        for i in g {
            assignment[i] = Split::ALL[best];
        }
    }
    for (s, a) in class.iter_mut().zip(assignment) {
        s.split = Some(a);
    }
}
