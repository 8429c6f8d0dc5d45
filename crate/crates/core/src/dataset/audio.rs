use std::path::Path;

use super::{SegmentRecord, WORKING_RATE};
use crate::error::{Error, Result};
use crate::sigcore::{resample, Signal};

/// Read a mono 16-bit PCM file, scaled to [-1, 1).
pub fn read_wav(path: &Path) -> Result<Signal> {
    if !path.exists() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    let mut reader = hound::WavReader::open(path)?;
    let spec = reader.spec();
    if spec.channels != 1
        || spec.bits_per_sample != 16
        || spec.sample_format != hound::SampleFormat::Int
    {
        return Err(Error::format(
            path.display().to_string(),
            format!(
                "expected mono 16-bit PCM, found {} channel(s) at {} bits",
                spec.channels, spec.bits_per_sample
            ),
        ));
    }
    let samples = reader
        .samples::<i16>()
        .map(|s| s.map(|v| v as f64 / 32768.0))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Signal::new(samples, spec.sample_rate as f64)
}

/// Write a mono 16-bit PCM file. Samples outside [-1, 1] are clipped.
pub fn write_wav(path: &Path, x: &Signal) -> Result<()> {
    let rate = x.sample_rate();
    if rate.fract() != 0.0 || rate > u32::MAX as f64 {
        return Err(Error::invalid(format!(
            "wav needs an integral sample rate, got {rate}"
        )));
    }
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: rate as u32,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let mut writer = hound::WavWriter::create(path, spec)?;
    for &v in x.samples() {
        writer.write_sample((v.clamp(-1.0, 1.0) * 32767.0).round() as i16)?;
    }
    writer.finalize()?;
    Ok(())
}

/// Load the audio covered by a segment, resampled to the working rate.
pub fn load_segment(seg: &SegmentRecord) -> Result<Signal> {
    let full = read_wav(&seg.path)?;
    let fs = full.sample_rate();
    let start = (seg.start_s * fs).round() as usize;
    let len = (seg.length_s * fs).round() as usize;
    let len = len.min(full.len().saturating_sub(start));
    let part = full.slice(start, len)?;
    if fs == WORKING_RATE {
        Ok(part)
    } else {
        resample(&part, WORKING_RATE)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wav_round_trip_is_within_quantization() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.wav");
        let x: Vec<f64> = (0..500).map(|i| (i as f64 * 0.05).sin() * 0.8).collect();
        write_wav(&path, &Signal::new(x.clone(), 2000.0).unwrap()).unwrap();
        let y = read_wav(&path).unwrap();
        assert_eq!(y.sample_rate(), 2000.0);
        for (a, b) in x.iter().zip(y.samples()) {
            assert!((a - b).abs() < 1.0 / 16000.0);
        }
    }

    #[test]
    fn missing_file() {
        assert!(matches!(
            read_wav(Path::new("/nonexistent/x.wav")),
            Err(Error::MissingFile(_))
        ));
    }
}
