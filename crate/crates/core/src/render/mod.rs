//! PNG rasters of colorings and sweep heatmaps, with JSON sidecars.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::evaluate::SweepResult;
use crate::formalize::CellColoring;
use crate::net::{argmax, ColoringFunction};

pub type Rgb = [u8; 3];

const PASTELS: [Rgb; 8] = [
    [0xFF, 0xAD, 0xAD],
    [0xFF, 0xD6, 0xA5],
    [0xFD, 0xFF, 0xB6],
    [0xCA, 0xFF, 0xBF],
    [0x9B, 0xF6, 0xFF],
    [0xA0, 0xC4, 0xFF],
    [0xBD, 0xB2, 0xFF],
    [0xFF, 0xC6, 0xFF],
];

pub const BONUS_RED: Rgb = [0xE0, 0x1B, 0x24];

/// The eight pastels, then golden-angle hues at matching lightness.
pub fn default_palette(colors: usize) -> Vec<Rgb> {
    (0..colors)
        .map(|i| {
            if i < PASTELS.len() {
                return PASTELS[i];
            }
            let hue = ((i - PASTELS.len()) as f64 * 137.507_764) % 360.0;
            hsl_to_rgb(hue, 0.9, 0.8)
        })
        .collect()
}

fn hsl_to_rgb(h: f64, s: f64, l: f64) -> Rgb {
    let c = (1.0 - (2.0 * l - 1.0).abs()) * s;
    let x = c * (1.0 - ((h / 60.0) % 2.0 - 1.0).abs());
    let (r, g, b) = match (h / 60.0) as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = l - c / 2.0;
    let to = |v: f64| ((v + m) * 255.0).round().clamp(0.0, 255.0) as u8;
    [to(r), to(g), to(b)]
}

pub fn hex(rgb: Rgb) -> String {
    format!("#{:02X}{:02X}{:02X}", rgb[0], rgb[1], rgb[2])
}

/// A planar window: pixel `(u, v)` samples
/// `origin + (u + 0.5) / width * right + (v + 0.5) / height * down`.
/// In 3D this is a slice through the plane spanned by `right` and `down`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub origin: Vec<f64>,
    pub right: Vec<f64>,
    pub down: Vec<f64>,
}

impl Window {
    /// Axis-aligned box `[x0, x1] x [y0, y1]`, `y` increasing upward.
    pub fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Window {
            origin: vec![x0, y1],
            right: vec![x1 - x0, 0.0],
            down: vec![0.0, y0 - y1],
        }
    }

    /// Square box of half-width `r` centered at the origin.
    pub fn square(r: f64) -> Self {
        Window::rect(-r, -r, r, r)
    }

    pub fn dim(&self) -> usize {
        self.origin.len()
    }

    fn validate(&self) -> Result<()> {
        let n = self.origin.len();
        if n < 2 || self.right.len() != n || self.down.len() != n {
            return Err(Error::invalid("window vectors must share a dimension of at least 2"));
        }
        let all = self.origin.iter().chain(&self.right).chain(&self.down);
        if all.clone().any(|v| !v.is_finite()) {
            return Err(Error::invalid("window must be finite"));
        }
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let (rr, dd, rd) = (
            dot(&self.right, &self.right),
            dot(&self.down, &self.down),
            dot(&self.right, &self.down),
        );
        if rr * dd - rd * rd <= 1e-12 * rr * dd || rr == 0.0 {
            return Err(Error::invalid("window is degenerate"));
        }
        Ok(())
    }

    pub fn point(&self, u: usize, v: usize, width: usize, height: usize) -> Vec<f64> {
        let (a, b) = ((u as f64 + 0.5) / width as f64, (v as f64 + 0.5) / height as f64);
        (0..self.dim())
            .map(|i| self.origin[i] + a * self.right[i] + b * self.down[i])
            .collect()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RasterSpec {
    pub window: Window,
    pub width: usize,
    pub height: usize,
    /// One entry per regular color.
    pub palette: Vec<Rgb>,
    pub bonus: Rgb,
    /// Darken each pixel by its maximum probability.
    pub shading: bool,
}

impl RasterSpec {
    pub fn new(window: Window, width: usize, height: usize, colors: usize) -> Self {
        RasterSpec {
            window,
            width,
            height,
            palette: default_palette(colors),
            bonus: BONUS_RED,
            shading: false,
        }
    }

    fn validate(&self, colors: usize, dim: usize) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::invalid("raster resolution must be at least 1x1"));
        }
        self.window.validate()?;
        if self.window.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: self.window.dim(),
            });
        }
        if self.palette.len() < colors {
            return Err(Error::invalid(format!(
                "palette has {} entries for {colors} colors",
                self.palette.len()
            )));
        }
        Ok(())
    }
}

/// Row-major RGB image plus the color index behind each pixel
/// (`0..c` regular, `c` bonus; heatmaps leave `labels` empty).
#[derive(Clone, Debug, PartialEq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<Rgb>,
    pub labels: Vec<u32>,
}

impl Image {
    pub fn pixel(&self, u: usize, v: usize) -> Rgb {
        self.pixels[v * self.width + u]
    }

    pub fn encode_png(&self) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        {
            let mut enc = png::Encoder::new(&mut out, self.width as u32, self.height as u32);
            enc.set_color(png::ColorType::Rgb);
            enc.set_depth(png::BitDepth::Eight);
            let mut writer = enc.write_header()?;
            let data: Vec<u8> = self.pixels.iter().flatten().copied().collect();
            writer.write_image_data(&data)?;
        }
        Ok(out)
    }

    pub fn save_png(&self, path: &Path) -> Result<()> {
        let bytes = self.encode_png()?;
        std::fs::write(path, bytes)?;
        Ok(())
    }
}

/// Argmax raster of a coloring function. `params` fills the distance inputs
/// of parametrized networks; outputs at index `regular` or above are drawn
/// in the bonus color.
pub fn rasterize_coloring(
    coloring: &dyn ColoringFunction,
    params: &[f64],
    regular: usize,
    spec: &RasterSpec,
) -> Result<Image> {
    spec.validate(regular, coloring.spatial_dim())?;
    if params.len() != coloring.param_count() {
        return Err(Error::DimensionMismatch {
            expected: coloring.param_count(),
            actual: params.len(),
        });
    }
    let (w, h) = (spec.width, spec.height);
    let a = coloring.num_outputs();
    let rows: Vec<(Vec<Rgb>, Vec<u32>)> = (0..h)
        .into_par_iter()
        .map(|v| -> Result<(Vec<Rgb>, Vec<u32>)> {
            let mut inputs = Vec::with_capacity(w * (coloring.spatial_dim() + params.len()));
            for u in 0..w {
                inputs.extend(spec.window.point(u, v, w, h));
                inputs.extend_from_slice(params);
            }
            let probs = coloring.evaluate(&inputs)?;
            Ok(probs
                .chunks(a)
                .map(|p| {
                    let k = argmax(p);
                    let label = k.min(regular) as u32;
                    let base = if k < regular { spec.palette[k] } else { spec.bonus };
                    let rgb = if spec.shading { shade(base, p[k]) } else { base };
                    (rgb, label)
                })
                .unzip())
        })
        .collect::<Result<_>>()?;
    Ok(assemble(w, h, rows))
}

fn shade(rgb: Rgb, p: f64) -> Rgb {
    let f = 0.5 + 0.5 * p.clamp(0.0, 1.0);
    rgb.map(|c| (c as f64 * f).round() as u8)
}

fn assemble(width: usize, height: usize, rows: Vec<(Vec<Rgb>, Vec<u32>)>) -> Image {
    let mut pixels = Vec::with_capacity(width * height);
    let mut labels = Vec::with_capacity(width * height);
    for (p, l) in rows {
        pixels.extend(p);
        labels.extend(l);
    }
    Image {
        width,
        height,
        pixels,
        labels,
    }
}

/// Raster of the periodic extension of a cell coloring.
pub fn rasterize_cells(coloring: &CellColoring, spec: &RasterSpec) -> Result<Image> {
    let c = coloring.num_colors();
    spec.validate(c, coloring.grid().dim())?;
    let (w, h) = (spec.width, spec.height);
    let rows = (0..h)
        .into_par_iter()
        .map(|v| {
            (0..w)
                .map(|u| {
                    let k = coloring.color_at(&spec.window.point(u, v, w, h)) as usize - 1;
                    let rgb = if k < c { spec.palette[k] } else { spec.bonus };
                    (rgb, k as u32)
                })
                .unzip()
        })
        .collect();
    Ok(assemble(w, h, rows))
}

/// White at rate 0 to dark blue at the largest rate.
fn ramp(t: f64) -> Rgb {
    let t = t.clamp(0.0, 1.0);
    let lerp = |a: f64, b: f64| (a + (b - a) * t).round() as u8;
    [lerp(255.0, 8.0), lerp(255.0, 48.0), lerp(255.0, 107.0)]
}

/// Heatmap of a sweep, `scale` pixels per grid point. The first axis runs
/// left to right; a second axis runs bottom to top.
pub fn render_heatmap(sweep: &SweepResult, scale: usize) -> Result<Image> {
    sweep.grid.validate()?;
    if scale == 0 {
        return Err(Error::invalid("heatmap scale must be positive"));
    }
    let shape = sweep.grid.shape();
    let (nx, ny) = (shape[0], shape.get(1).copied().unwrap_or(1));
    let max = sweep.rates.iter().copied().fold(0.0, f64::max);
    let (w, h) = (nx * scale, ny * scale);
    let mut pixels = Vec::with_capacity(w * h);
    for v in 0..h {
        let j = ny - 1 - v / scale;
        for u in 0..w {
            let i = u / scale;
            let r = sweep.rates[i * ny + j];
            pixels.push(ramp(if max > 0.0 { r / max } else { 0.0 }));
        }
    }
    Ok(Image {
        width: w,
        height: h,
        pixels,
        labels: Vec::new(),
    })
}

/// Metadata written next to each PNG.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Sidecar {
    pub kind: String,
    pub width: usize,
    pub height: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<Window>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub palette: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bonus: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub axes: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source_sha256: Option<String>,
}

impl Sidecar {
    pub fn for_raster(spec: &RasterSpec, source: Option<&Path>) -> Result<Self> {
        let mut s = Sidecar {
            kind: "coloring".into(),
            width: spec.width,
            height: spec.height,
            window: Some(spec.window.clone()),
            palette: spec.palette.iter().map(|&c| hex(c)).collect(),
            bonus: Some(hex(spec.bonus)),
            axes: Vec::new(),
            max_rate: None,
            source: None,
            source_sha256: None,
        };
        s.set_source(source)?;
        Ok(s)
    }

    pub fn for_heatmap(sweep: &SweepResult, image: &Image, source: Option<&Path>) -> Result<Self> {
        let mut s = Sidecar {
            kind: "heatmap".into(),
            width: image.width,
            height: image.height,
            window: None,
            palette: Vec::new(),
            bonus: None,
            axes: sweep.grid.axes.clone(),
            max_rate: Some(sweep.rates.iter().copied().fold(0.0, f64::max)),
            source: None,
            source_sha256: None,
        };
        s.set_source(source)?;
        Ok(s)
    }

    fn set_source(&mut self, source: Option<&Path>) -> Result<()> {
        if let Some(p) = source {
            self.source = Some(p.display().to_string());
            self.source_sha256 = Some(file_sha256(p)?);
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = BufWriter::new(File::create(path)?);
        serde_json::to_writer_pretty(file, self).map_err(|e| Error::Io(e.into()))?;
        Ok(())
    }
}

pub fn file_sha256(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path)?;
    Ok(Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect())
}

/// Sidecar path for an image: the image file name with `.json` appended.
pub fn sidecar_path(image: &Path) -> std::path::PathBuf {
    let mut name = image.file_name().unwrap_or_default().to_os_string();
    name.push(".json");
    image.with_file_name(name)
}

/// Writes `image` to `path` and its sidecar next to it.
pub fn save_with_sidecar(image: &Image, sidecar: &Sidecar, path: &Path) -> Result<()> {
    image.save_png(path)?;
    sidecar.save(&sidecar_path(path))
}
