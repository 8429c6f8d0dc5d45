use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use super::{ExportedImage, Provenance, ValueSpace};
use crate::error::{ensure, Error, Result};
use crate::tfd::{TfdGrid, TfdKind};

pub const GRID_MAGIC: &[u8; 4] = b"TFDG";
pub const TENSOR_MAGIC: &[u8; 4] = b"TFDT";
const FORMAT_VERSION: u16 = 1;

/// `<segment_id>__<kind>[-<kind>...].png`
pub fn image_file_name(provenance: &Provenance) -> String {
    let kinds: Vec<&str> = provenance.kinds.iter().map(|k| k.name()).collect();
    format!("{}__{}.png", provenance.segment_id, kinds.join("-"))
}

/// Write an 8-bit greyscale or RGB PNG.
pub fn write_png(img: &ExportedImage, path: &Path) -> Result<()> {
    ensure!(
        img.value_space() == ValueSpace::Raster8,
        "only 8-bit rasters can be written as png; normalized images go to tensors"
    );
    let colour = match img.channels() {
        1 => png::ColorType::Grayscale,
        _ => png::ColorType::Rgb,
    };
    let file = File::create(path)?;
    let mut encoder = png::Encoder::new(
        BufWriter::new(file),
        img.width() as u32,
        img.height() as u32,
    );
    encoder.set_color(colour);
    encoder.set_depth(png::BitDepth::Eight);
    let mut writer = encoder
        .write_header()
        .map_err(|e| Error::Png(e.to_string()))?;
    let bytes: Vec<u8> = img.pixels().iter().map(|v| *v as u8).collect();
    writer
        .write_image_data(&bytes)
        .map_err(|e| Error::Png(e.to_string()))?;
    writer.finish().map_err(|e| Error::Png(e.to_string()))?;
    Ok(())
}

pub fn read_png(path: &Path) -> Result<ExportedImage> {
    let decoder = png::Decoder::new(std::io::BufReader::new(File::open(path)?));
    let mut reader = decoder.read_info().map_err(|e| Error::Png(e.to_string()))?;
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| Error::Png("image too large".into()))?;
    let mut buf = vec![0; size];
    let info = reader
        .next_frame(&mut buf)
        .map_err(|e| Error::Png(e.to_string()))?;
    let channels = match (info.color_type, info.bit_depth) {
        (png::ColorType::Grayscale, png::BitDepth::Eight) => 1,
        (png::ColorType::Rgb, png::BitDepth::Eight) => 3,
        other => return Err(Error::Png(format!("unsupported png layout {other:?}"))),
    };
    let pixels = buf[..info.buffer_size()]
        .iter()
        .map(|&b| b as f64)
        .collect();
    ExportedImage::new(
        info.height as usize,
        info.width as usize,
        channels,
        pixels,
        ValueSpace::Raster8,
        Provenance::default(),
    )
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
    context: &'static str,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.bytes.len() {
            return Err(Error::format(self.context, "truncated"));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f32(&mut self) -> Result<f32> {
        Ok(f32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn header(&mut self, magic: &[u8; 4]) -> Result<()> {
        if self.take(4)? != magic {
            return Err(Error::format(self.context, "bad magic"));
        }
        let version = self.u16()?;
        if version != FORMAT_VERSION {
            return Err(Error::format(
                self.context,
                format!("unsupported version {version}"),
            ));
        }
        Ok(())
    }

    fn finish(&self) -> Result<()> {
        if self.pos != self.bytes.len() {
            return Err(Error::format(self.context, "trailing bytes"));
        }
        Ok(())
    }
}

/// Grid container: magic, version (u16), rows and cols (u32), time and
/// frequency axes (f64), then row-major values (f32). Little-endian throughout.
pub fn encode_grid(grid: &TfdGrid) -> Vec<u8> {
    let (rows, cols) = (grid.rows(), grid.cols());
    let mut out = Vec::with_capacity(14 + 8 * (rows + cols) + 4 * rows * cols);
    out.extend_from_slice(GRID_MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&(rows as u32).to_le_bytes());
    out.extend_from_slice(&(cols as u32).to_le_bytes());
    for v in grid.time_axis().iter().chain(grid.freq_axis()) {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for v in grid.values() {
        out.extend_from_slice(&(*v as f32).to_le_bytes());
    }
    out
}

/// Inverse of [`encode_grid`]; the container does not carry the kind.
pub fn decode_grid(bytes: &[u8], kind: TfdKind) -> Result<TfdGrid> {
    let mut cur = Cursor {
        bytes,
        pos: 0,
        context: "grid container",
    };
    cur.header(GRID_MAGIC)?;
    let rows = cur.u32()? as usize;
    let cols = cur.u32()? as usize;
    let expected = 8 * (rows + cols) + 4 * rows * cols;
    ensure!(
        bytes.len() - cur.pos == expected,
        "grid container size mismatch for {rows}x{cols}"
    );
    let time_axis = (0..rows).map(|_| cur.f64()).collect::<Result<Vec<_>>>()?;
    let freq_axis = (0..cols).map(|_| cur.f64()).collect::<Result<Vec<_>>>()?;
    let values = (0..rows * cols)
        .map(|_| cur.f32().map(f64::from))
        .collect::<Result<Vec<_>>>()?;
    cur.finish()?;
    TfdGrid::new(kind, time_axis, freq_axis, values, Default::default())
}

/// Tensor container: magic, version (u16), height, width and channels (u32),
/// then HWC values (f32).
pub fn encode_tensor(img: &ExportedImage) -> Vec<u8> {
    let mut out = Vec::with_capacity(18 + 4 * img.pixels().len());
    out.extend_from_slice(TENSOR_MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    for d in [img.height(), img.width(), img.channels()] {
        out.extend_from_slice(&(d as u32).to_le_bytes());
    }
    for v in img.pixels() {
        out.extend_from_slice(&(*v as f32).to_le_bytes());
    }
    out
}

pub fn decode_tensor(bytes: &[u8]) -> Result<ExportedImage> {
    let mut cur = Cursor {
        bytes,
        pos: 0,
        context: "tensor container",
    };
    cur.header(TENSOR_MAGIC)?;
    let h = cur.u32()? as usize;
    let w = cur.u32()? as usize;
    let c = cur.u32()? as usize;
    ensure!(
        bytes.len() - cur.pos == 4 * h * w * c,
        "tensor container size mismatch for {h}x{w}x{c}"
    );
    let pixels = (0..h * w * c)
        .map(|_| cur.f32().map(f64::from))
        .collect::<Result<Vec<_>>>()?;
    cur.finish()?;
    ExportedImage::new(
        h,
        w,
        c,
        pixels,
        ValueSpace::NormalizedReal,
        Provenance::default(),
    )
}
