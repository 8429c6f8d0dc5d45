use super::raster::{bilinear_resize, quantize};
use super::{ExportedImage, InputKind, Provenance, ValueSpace};
use crate::error::{ensure, Result};
use crate::sigcore::Signal;

/// Side of the square drawing canvas, before resizing.
pub const CANVAS_SIZE: usize = 448;
/// Blank rows kept above and below the trace on the canvas.
pub const PLOT_MARGIN: usize = 4;

fn draw_line(canvas: &mut [f64], size: usize, (x0, y0): (i64, i64), (x1, y1): (i64, i64)) {
    let (dx, dy) = ((x1 - x0).abs(), -(y1 - y0).abs());
    let (sx, sy) = (if x0 < x1 { 1 } else { -1 }, if y0 < y1 { 1 } else { -1 });
    let (mut x, mut y, mut err) = (x0, y0, dx + dy);
    loop {
        canvas[y as usize * size + x as usize] = 0.0;
        if x == x1 && y == y1 {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x += sx;
        }
        if e2 <= dx {
            err += dx;
            y += sy;
        }
    }
}

/// Amplitude-versus-sample plot: black 1-pixel trace connecting successive
/// samples on a white canvas, symmetric about mid-height, then resized.
///
/// With `log_scale`, samples pass through `sign(v) log10(1 + |v| / eps)` with
/// `eps = 1e-3 * max|x|` before plotting.
pub fn render_waveform(
    x: &Signal,
    log_scale: bool,
    out_size: (usize, usize),
) -> Result<ExportedImage> {
    x.require_len(2, "waveform rendering")?;
    let (out_h, out_w) = out_size;
    ensure!(out_h > 0 && out_w > 0, "output size must be positive");
    let mut v: Vec<f64> = x.samples().to_vec();
    let peak = v.iter().fold(0.0f64, |m, s| m.max(s.abs()));
    if log_scale && peak > 0.0 {
        let eps = 1e-3 * peak;
        v.iter_mut()
            .for_each(|s| *s = s.signum() * (1.0 + s.abs() / eps).log10());
    }
    let scale = v.iter().fold(0.0f64, |m, s| m.max(s.abs()));

    let size = CANVAS_SIZE;
    let centre = (size - 1) as f64 / 2.0;
    let half_span = centre - PLOT_MARGIN as f64;
    let n = v.len();
    let points: Vec<(i64, i64)> = v
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let px = (k as f64 * (size - 1) as f64 / (n - 1) as f64).round() as i64;
            let unit = if scale > 0.0 { s / scale } else { 0.0 };
            let py = (centre - unit * half_span).round() as i64;
            (px, py)
        })
        .collect();
    let mut canvas = vec![1.0; size * size];
    for pair in points.windows(2) {
        draw_line(&mut canvas, size, pair[0], pair[1]);
    }
    let mut pixels = bilinear_resize(&canvas, size, size, out_h, out_w);
    quantize(&mut pixels);
    ExportedImage::new(
        out_h,
        out_w,
        1,
        pixels,
        ValueSpace::Raster8,
        Provenance {
            segment_id: String::new(),
            kinds: vec![if log_scale {
                InputKind::Lograw
            } else {
                InputKind::Raw
            }],
        },
    )
}
