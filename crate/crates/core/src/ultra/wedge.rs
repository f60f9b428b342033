use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::frame::quantize;
use crate::{Error, Result};

/// Fan geometry for polar-to-Cartesian display.
///
/// The probe sits at the bottom centre of the raster. Scanline 0 points at
/// `-field_of_view / 2` (left edge) and the last scanline at
/// `+field_of_view / 2`; sample `s` lies at radius `zero_offset + s` in
/// sample units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WedgeGeometry {
    pub field_of_view: f64,
    pub zero_offset: f64,
    pub raster_width: usize,
    pub raster_height: usize,
}

impl Default for WedgeGeometry {
    fn default() -> Self {
        Self {
            field_of_view: 92.0,
            zero_offset: 50.0,
            raster_width: 640,
            raster_height: 480,
        }
    }
}

impl WedgeGeometry {
    pub fn validate(&self) -> Result<()> {
        if !(self.field_of_view > 0.0 && self.field_of_view < 180.0) {
            return Err(Error::invalid(format!(
                "field of view must be in (0, 180) degrees, got {}",
                self.field_of_view
            )));
        }
        if !(self.zero_offset >= 0.0) {
            return Err(Error::invalid("zero offset must be non-negative"));
        }
        if self.raster_width == 0 || self.raster_height == 0 {
            return Err(Error::invalid("raster dimensions must be positive"));
        }
        Ok(())
    }

    /// Sample units per raster pixel, chosen so the whole fan fits.
    pub fn scale(&self, samples: usize) -> f64 {
        let outer = self.zero_offset + (samples.max(1) - 1) as f64;
        let half = (self.field_of_view / 2.0).to_radians();
        let span_x = 2.0 * outer * half.sin();
        (span_x / self.raster_width as f64).max(outer / self.raster_height as f64)
    }

    /// Position of a raster pixel centre relative to the probe, in sample
    /// units: `(x, y)` with `y` pointing away from the probe.
    pub fn pixel_position(&self, samples: usize, px: usize, py: usize) -> (f64, f64) {
        let k = self.scale(samples);
        let x = (px as f64 + 0.5 - self.raster_width as f64 / 2.0) * k;
        let y = (self.raster_height as f64 - (py as f64 + 0.5)) * k;
        (x, y)
    }
}

/// An 8-bit display raster, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

impl Raster {
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }
}

/// Render a scanline grid (`scanlines x samples`) as a fan. Pixels outside
/// the fan are 0; inside, values are bilinear lookups in scanline space.
pub fn render_wedge(grid: &Array2<f64>, geometry: &WedgeGeometry) -> Result<Raster> {
    geometry.validate()?;
    let (lines, samples) = grid.dim();
    if lines < 2 || samples < 2 {
        return Err(Error::invalid(format!(
            "wedge rendering needs at least 2x2 scanline data, got {lines}x{samples}"
        )));
    }
    let fov = geometry.field_of_view.to_radians();
    let outer = geometry.zero_offset + (samples - 1) as f64;
    let mut pixels = vec![0u8; geometry.raster_width * geometry.raster_height];

    for py in 0..geometry.raster_height {
        for px in 0..geometry.raster_width {
            let (x, y) = geometry.pixel_position(samples, px, py);
            let r = x.hypot(y);
            let theta = x.atan2(y);
            if r < geometry.zero_offset || r > outer || theta.abs() > fov / 2.0 {
                continue;
            }
            let line = ((theta + fov / 2.0) / fov * (lines - 1) as f64).clamp(0.0, (lines - 1) as f64);
            let sample = (r - geometry.zero_offset).clamp(0.0, (samples - 1) as f64);
            pixels[py * geometry.raster_width + px] = quantize(bilinear(grid, line, sample));
        }
    }
    Ok(Raster {
        width: geometry.raster_width,
        height: geometry.raster_height,
        pixels,
    })
}

fn bilinear(grid: &Array2<f64>, r: f64, c: f64) -> f64 {
    let (h, w) = grid.dim();
    let r0 = (r.floor() as usize).min(h - 2);
    let c0 = (c.floor() as usize).min(w - 2);
    let (tr, tc) = (r - r0 as f64, c - c0 as f64);
    let top = grid[[r0, c0]] * (1.0 - tc) + grid[[r0, c0 + 1]] * tc;
    let bottom = grid[[r0 + 1, c0]] * (1.0 - tc) + grid[[r0 + 1, c0 + 1]] * tc;
    top * (1.0 - tr) + bottom * tr
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geometry() -> WedgeGeometry {
        WedgeGeometry {
            field_of_view: 80.0,
            zero_offset: 20.0,
            raster_width: 120,
            raster_height: 90,
        }
    }

    /// Point-in-annular-sector test built from the pixel centre using
    /// trigonometry on the half-angle rather than atan2.
    fn in_sector(g: &WedgeGeometry, samples: usize, px: usize, py: usize) -> bool {
        let (x, y) = g.pixel_position(samples, px, py);
        let outer = g.zero_offset + (samples - 1) as f64;
        let r2 = x * x + y * y;
        let half = (g.field_of_view / 2.0).to_radians();
        y > 0.0
            && r2 >= g.zero_offset * g.zero_offset
            && r2 <= outer * outer
            && x.abs() <= y * half.tan()
    }

    #[test]
    fn zero_frame_renders_black() {
        let raster = render_wedge(&Array2::zeros((16, 64)), &geometry()).unwrap();
        assert!(raster.pixels.iter().all(|&p| p == 0));
    }

    #[test]
    fn full_frame_fills_exactly_the_sector() {
        let g = geometry();
        let samples = 64;
        let raster = render_wedge(&Array2::from_elem((16, samples), 255.0), &g).unwrap();
        let mut inside = 0;
        for py in 0..g.raster_height {
            for px in 0..g.raster_width {
                let expect = in_sector(&g, samples, px, py);
                let got = raster.get(px, py);
                if expect {
                    inside += 1;
                    assert_eq!(got, 255, "pixel ({px},{py}) inside the fan");
                } else {
                    assert_eq!(got, 0, "pixel ({px},{py}) outside the fan");
                }
            }
        }
        let lit = raster.pixels.iter().filter(|&&p| p > 0).count();
        assert_eq!(lit, inside);
        assert!(inside > 1000);
    }

    #[test]
    fn first_scanline_lights_the_left_edge() {
        let g = geometry();
        let lines = 16;
        let mut grid = Array2::zeros((lines, 64));
        grid.row_mut(0).fill(255.0);
        let raster = render_wedge(&grid, &g).unwrap();
        let fov = g.field_of_view.to_radians();
        let step = fov / (lines - 1) as f64;
        let mut lit = 0;
        for py in 0..g.raster_height {
            for px in 0..g.raster_width {
                if raster.get(px, py) == 0 {
                    continue;
                }
                lit += 1;
                let (x, y) = g.pixel_position(64, px, py);
                let angle = x.atan2(y);
                // lit pixels lie within one beam spacing of -fov/2
                assert!(angle < -fov / 2.0 + step, "angle {angle}");
                assert!(x < 0.0);
            }
        }
        assert!(lit > 0);
    }

    #[test]
    fn invalid_geometry_is_rejected() {
        let mut g = geometry();
        g.field_of_view = 180.0;
        assert!(render_wedge(&Array2::zeros((4, 4)), &g).is_err());
        g.field_of_view = 0.0;
        assert!(g.validate().is_err());
    }
}
