use super::{ExportedImage, InputKind, Provenance, ValueSpace};
use crate::error::{ensure, Error, Result};
use crate::tfd::TfdGrid;

/// Bilinear resampling of a single-channel row-major plane, pixel centres at
/// half-integer positions.
pub fn bilinear_resize(
    src: &[f64],
    src_h: usize,
    src_w: usize,
    out_h: usize,
    out_w: usize,
) -> Vec<f64> {
    debug_assert_eq!(src.len(), src_h * src_w);
    let taps = |out: usize, len_in: usize, len_out: usize| -> (usize, usize, f64) {
        let pos = ((out as f64 + 0.5) * len_in as f64 / len_out as f64 - 0.5)
            .clamp(0.0, (len_in - 1) as f64);
        let lo = pos.floor() as usize;
        let hi = (lo + 1).min(len_in - 1);
        (lo, hi, pos - lo as f64)
    };
    let cols: Vec<_> = (0..out_w).map(|x| taps(x, src_w, out_w)).collect();
    let mut out = Vec::with_capacity(out_h * out_w);
    for y in 0..out_h {
        let (y0, y1, fy) = taps(y, src_h, out_h);
        for &(x0, x1, fx) in &cols {
            let top = src[y0 * src_w + x0] * (1.0 - fx) + src[y0 * src_w + x1] * fx;
            let bottom = src[y1 * src_w + x0] * (1.0 - fx) + src[y1 * src_w + x1] * fx;
            out.push(top * (1.0 - fy) + bottom * fy);
        }
    }
    out
}

pub(crate) fn min_max_unit(values: &mut [f64]) {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    if hi > lo {
        let span = hi - lo;
        values.iter_mut().for_each(|v| *v = (*v - lo) / span);
    } else {
        values.iter_mut().for_each(|v| *v = 0.0);
    }
}

pub(crate) fn quantize(values: &mut [f64]) {
    values
        .iter_mut()
        .for_each(|v| *v = (v.clamp(0.0, 1.0) * 255.0).round());
}

/// Greyscale raster of a grid: time runs left to right, frequency bottom to
/// top. Magnitudes are optionally compressed with `log10(1 + v / eps)` where
/// `eps = 1e-6 * max`, then min-max scaled per image, resized, and quantized
/// to 8 bits.
pub fn grid_to_image(
    grid: &TfdGrid,
    log_compress: bool,
    out_size: (usize, usize),
) -> Result<ExportedImage> {
    let (out_h, out_w) = out_size;
    ensure!(out_h > 0 && out_w > 0, "output size must be positive");
    let (rows, cols) = (grid.rows(), grid.cols());
    let mut mags: Vec<f64> = grid.values().iter().map(|v| v.abs()).collect();
    if log_compress {
        let max = mags.iter().fold(0.0f64, |m, v| m.max(*v));
        if max > 0.0 {
            let eps = 1e-6 * max;
            mags.iter_mut().for_each(|v| *v = (1.0 + *v / eps).log10());
        }
    }
    min_max_unit(&mut mags);

    // plane rows = frequency (highest first), plane columns = time
    let ascending = grid.freq_axis().first() <= grid.freq_axis().last();
    let mut plane = vec![0.0; rows * cols];
    for t in 0..rows {
        for f in 0..cols {
            let y = if ascending { cols - 1 - f } else { f };
            plane[y * rows + t] = mags[t * cols + f];
        }
    }
    let mut pixels = bilinear_resize(&plane, cols, rows, out_h, out_w);
    quantize(&mut pixels);
    ExportedImage::new(
        out_h,
        out_w,
        1,
        pixels,
        ValueSpace::Raster8,
        Provenance {
            segment_id: String::new(),
            kinds: vec![InputKind::from(grid.kind())],
        },
    )
}

/// Per-image standardization over all pixels and channels.
pub fn normalize(img: &ExportedImage) -> Result<ExportedImage> {
    let (mean, std) = img.mean_std();
    if std.is_nan() || std <= 1e-12 * mean.abs().max(1.0) {
        return Err(Error::ZeroVariance(format!(
            "image of segment '{}' has constant pixels",
            img.provenance().segment_id
        )));
    }
    let pixels = img.pixels().iter().map(|v| (v - mean) / std).collect();
    ExportedImage::new(
        img.height(),
        img.width(),
        img.channels(),
        pixels,
        ValueSpace::NormalizedReal,
        img.provenance().clone(),
    )
}

/// Interleave three single-channel images as channels 0, 1, 2.
pub fn stack3(a: &ExportedImage, b: &ExportedImage, c: &ExportedImage) -> Result<ExportedImage> {
    let parts = [a, b, c];
    for p in parts {
        ensure!(p.channels() == 1, "stack3 takes single-channel images");
        ensure!(
            p.height() == a.height() && p.width() == a.width(),
            "stack3 size mismatch: {}x{} vs {}x{}",
            p.height(),
            p.width(),
            a.height(),
            a.width()
        );
        ensure!(
            p.provenance().segment_id == a.provenance().segment_id,
            "stack3 segment mismatch: '{}' vs '{}'",
            p.provenance().segment_id,
            a.provenance().segment_id
        );
        ensure!(
            p.value_space() == a.value_space(),
            "stack3 value-space mismatch"
        );
    }
    let mut pixels = Vec::with_capacity(a.pixels().len() * 3);
    for i in 0..a.pixels().len() {
        for p in parts {
            pixels.push(p.pixels()[i]);
        }
    }
    let kinds = parts
        .iter()
        .flat_map(|p| p.provenance().kinds.iter().copied())
        .collect();
    ExportedImage::new(
        a.height(),
        a.width(),
        3,
        pixels,
        a.value_space(),
        Provenance {
            segment_id: a.provenance().segment_id.clone(),
            kinds,
        },
    )
}

/// Copy a single-channel image into three identical channels.
pub fn replicate3(a: &ExportedImage) -> Result<ExportedImage> {
    ensure!(
        a.channels() == 1,
        "replicate3 takes a single-channel image, got {} channels",
        a.channels()
    );
    stack3(a, a, a)
}
