mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use proptest::prelude::*;
use tfdkit::dataset::{
    segment, split, Label, RecordingMeta, SegmentRecord, Split, SplitOptions, SplitRatios,
};
use tfdkit::evalstats::{mann_whitney_u, MwMode};
use tfdkit::imaging::{grid_to_image, stack3, ExportedImage, InputKind, Provenance, ValueSpace};
use tfdkit::refclf::{predict_proba, train_with_history, Example, TrainConfig};
use tfdkit::sigcore::{analytic, dft_real, Signal};
use tfdkit::tfd::{TfdGrid, TfdKind};

fn recording(duration_s: f64, label: Label) -> RecordingMeta {
    RecordingMeta {
        id: "r".into(),
        path: PathBuf::from("r.wav"),
        label,
        duration_s,
        sample_rate: 2000.0,
    }
}

fn segments(normal: usize, abnormal: usize) -> Vec<SegmentRecord> {
    let labels = std::iter::repeat_n(Label::Normal, normal)
        .chain(std::iter::repeat_n(Label::Abnormal, abnormal));
    labels
        .enumerate()
        .map(|(i, label)| SegmentRecord {
            segment_id: format!("rec{i:04}_s000"),
            recording_id: format!("rec{i:04}"),
            path: PathBuf::from(format!("rec{i:04}.wav")),
            sample_rate: 2000.0,
            start_s: 0.0,
            length_s: 5.0,
            label,
            split: None,
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn segment_count_and_layout(duration in 0.0f64..120.0, len in 0.5f64..10.0) {
        let segs = segment(&recording(duration, Label::Normal), len).unwrap();
        let expected = (duration / len + 1e-9).floor() as usize;
        prop_assert_eq!(segs.len(), expected);
        for (i, s) in segs.iter().enumerate() {
            prop_assert_eq!(s.start_s, i as f64 * len);
            prop_assert!(s.start_s + s.length_s <= duration + 1e-6);
        }
    }

    #[test]
    fn split_partitions_and_stratifies(
        normal in 0usize..300,
        abnormal in 0usize..120,
        seed in any::<u64>(),
        ratios in (1u32..10, 1u32..5, 1u32..5),
    ) {
        let segs = segments(normal, abnormal);
        let ratios = SplitRatios([ratios.0, ratios.1, ratios.2]);
        let opts = SplitOptions { ratios, seed, by_recording: false };
        let m = split(&segs, opts).unwrap();
        prop_assert_eq!(m.segments.len(), segs.len());
        let ids: BTreeSet<_> = m.segments.iter().map(|s| s.segment_id.clone()).collect();
        prop_assert_eq!(ids.len(), segs.len());
        prop_assert!(m.segments.iter().all(|s| s.split.is_some()));
        let sum: u32 = ratios.0.iter().sum();
        for label in Label::ALL {
            let n = segs.iter().filter(|s| s.label == label).count();
            for (i, sp) in Split::ALL.into_iter().enumerate() {
                let share = n as f64 * ratios.0[i] as f64 / sum as f64;
                prop_assert!((m.count(label, sp) as f64 - share).abs() < 1.0 + 1e-9);
            }
        }
        prop_assert_eq!(split(&segs, opts).unwrap().segments, m.segments);
    }

    #[test]
    fn grid_image_preserves_order(values in prop::collection::vec(0.0f64..1e3, 48)) {
        // a 6-row by 8-column grid rendered at 8x6 pixels maps cells one to one
        let grid = TfdGrid::new(
            TfdKind::Stft,
            (0..6).map(|t| t as f64).collect(),
            (0..8).map(|f| f as f64).collect(),
            values.clone(),
            BTreeMap::new(),
        ).unwrap();
        let img = grid_to_image(&grid, false, (8, 6)).unwrap();
        let pixel = |t: usize, f: usize| img.at(7 - f, t, 0);
        for a in 0..48 {
            for b in 0..48 {
                if values[a] < values[b] {
                    prop_assert!(pixel(a / 8, a % 8) <= pixel(b / 8, b % 8));
                }
            }
        }
        prop_assert!(img.pixels().iter().all(|p| (0.0..=255.0).contains(p) && p.fract() == 0.0));
    }

    #[test]
    fn stack3_round_trips(px in prop::collection::vec(0u8..=255, 3 * 20)) {
        let chans: Vec<ExportedImage> = px
            .chunks(20)
            .enumerate()
            .map(|(i, c)| {
                let provenance = Provenance { segment_id: "s".into(), kinds: vec![InputKind::ALL[i]] };
                let px = c.iter().map(|&v| v as f64).collect();
                ExportedImage::new(4, 5, 1, px, ValueSpace::Raster8, provenance).unwrap()
            })
            .collect();
        let s = stack3(&chans[0], &chans[1], &chans[2]).unwrap();
        prop_assert_eq!(s.channels(), 3);
        prop_assert_eq!(&s.provenance().kinds, &InputKind::ALL[..3].to_vec());
        for (c, src) in chans.iter().enumerate() {
            let back = s.channel(c).unwrap();
            prop_assert_eq!(back.pixels(), src.pixels());
        }
    }

    #[test]
    fn mann_whitney_swap_and_monotone_invariance(
        a in prop::collection::vec(0u8..6, 1..8),
        b in prop::collection::vec(0u8..6, 1..8),
    ) {
        let a: Vec<f64> = a.into_iter().map(f64::from).collect();
        let b: Vec<f64> = b.into_iter().map(f64::from).collect();
        for mode in [MwMode::Exact, MwMode::NormalApprox] {
            let ab = mann_whitney_u(&a, &b, mode).unwrap();
            let ba = mann_whitney_u(&b, &a, mode).unwrap();
            prop_assert_eq!(ab.u + ba.u, (a.len() * b.len()) as f64);
            prop_assert!((ab.p_two_sided - ba.p_two_sided).abs() < 1e-12);
            let t = |v: &f64| (0.3 * v).exp() - 7.0;
            let ta: Vec<f64> = a.iter().map(t).collect();
            let tb: Vec<f64> = b.iter().map(t).collect();
            let tr = mann_whitney_u(&ta, &tb, mode).unwrap();
            prop_assert_eq!(tr.u, ab.u);
            prop_assert!((tr.p_two_sided - ab.p_two_sided).abs() < 1e-12);
            prop_assert!(ab.p_two_sided > 0.0 && ab.p_two_sided <= 1.0);
        }
    }

    #[test]
    fn parseval_and_analytic_real_part(x in prop::collection::vec(-10.0f64..10.0, 2..300)) {
        let e_time: f64 = x.iter().map(|v| v * v).sum();
        let e_freq: f64 = dft_real(&x).unwrap().iter().map(|v| v.norm_sqr()).sum::<f64>() / x.len() as f64;
        prop_assert!((e_time - e_freq).abs() <= 1e-9 * e_time.max(1e-300));
        let z = analytic(&Signal::new(x.clone(), 100.0).unwrap()).unwrap();
        prop_assert!(z.iter().zip(&x).all(|(zv, xv)| zv.re == *xv));
    }
}

fn toy_examples(seed: u64) -> Vec<Example> {
    let mut r = common::rng(seed);
    (0..24)
        .map(|i| {
            let label = Label::from_index(i % 2);
            let mut features = common::random_real(&mut r, 6);
            features[0] += if label == Label::Abnormal { 1.0 } else { -1.0 };
            Example { features, label }
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn full_batch_loss_never_increases(seed in 0u64..1000) {
        let data = toy_examples(seed);
        let cfg = TrainConfig { learning_rate: 0.01, epochs: 40, batch_size: data.len(), seed, hidden_units: 8 };
        let (_, history) = train_with_history(&data, &cfg).unwrap();
        for w in history.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-12, "{} -> {}", w[0], w[1]);
        }
    }

    #[test]
    fn flipping_labels_swaps_probabilities(seed in 0u64..1000) {
        let data = toy_examples(seed);
        let flipped: Vec<Example> = data
            .iter()
            .map(|e| Example { features: e.features.clone(), label: Label::from_index(1 - e.label.index()) })
            .collect();
        let cfg = TrainConfig { epochs: 15, batch_size: 5, seed, hidden_units: 8, ..TrainConfig::default() };
        let p = tfdkit::refclf::train(&data, &cfg).unwrap();
        let q = tfdkit::refclf::train(&flipped, &cfg).unwrap();
        let feats: Vec<Vec<f64>> = data.iter().map(|e| e.features.clone()).collect();
        let pp = predict_proba(&p, &feats).unwrap();
        let qq = predict_proba(&q, &feats).unwrap();
        for (a, b) in pp.iter().zip(&qq) {
            prop_assert!((a[0] - b[1]).abs() < 1e-12 && (a[1] - b[0]).abs() < 1e-12);
        }
    }
}
