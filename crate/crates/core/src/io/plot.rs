//! Minimal raster plot of a force-displacement curve, written as PNG.
//! No text is drawn; axes start at zero and ticks divide them in fifths.

use std::io::BufWriter;
use std::path::Path;

use crate::error::{Error, Result};

const WIDTH: usize = 800;
const HEIGHT: usize = 500;
const MARGIN: usize = 50;

type Rgb = [u8; 3];
const WHITE: Rgb = [255, 255, 255];
const AXIS: Rgb = [40, 40, 40];
const GRID: Rgb = [225, 225, 225];
const CURVE: Rgb = [20, 70, 170];
const PEAK: Rgb = [200, 30, 30];

struct Canvas {
    pixels: Vec<u8>,
}

impl Canvas {
    fn new() -> Self {
        Self {
            pixels: WHITE.repeat(WIDTH * HEIGHT),
        }
    }

    fn put(&mut self, x: i64, y: i64, c: Rgb) {
        if x >= 0 && y >= 0 && (x as usize) < WIDTH && (y as usize) < HEIGHT {
            let i = 3 * (y as usize * WIDTH + x as usize);
            self.pixels[i..i + 3].copy_from_slice(&c);
        }
    }

    fn line(&mut self, (x0, y0): (i64, i64), (x1, y1): (i64, i64), c: Rgb) {
        let (dx, dy) = ((x1 - x0).abs(), -(y1 - y0).abs());
        let (sx, sy) = (if x0 < x1 { 1 } else { -1 }, if y0 < y1 { 1 } else { -1 });
        let (mut x, mut y, mut err) = (x0, y0, dx + dy);
        loop {
            self.put(x, y, c);
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

    fn thick_line(&mut self, a: (i64, i64), b: (i64, i64), c: Rgb) {
        for (ox, oy) in [(0, 0), (1, 0), (0, 1)] {
            self.line((a.0 + ox, a.1 + oy), (b.0 + ox, b.1 + oy), c);
        }
    }
}

/// Renders `(d, F)` points; the largest load is marked.
pub fn render_curve(points: &[(f64, f64)]) -> Vec<u8> {
    let mut canvas = Canvas::new();
    let (x0, y0) = (MARGIN as i64, (HEIGHT - MARGIN) as i64);
    let (x1, y1) = ((WIDTH - MARGIN) as i64, MARGIN as i64);
    for k in 1..=5 {
        let gx = x0 + (x1 - x0) * k / 5;
        let gy = y0 + (y1 - y0) * k / 5;
        canvas.line((gx, y0), (gx, y1), GRID);
        canvas.line((x0, gy), (x1, gy), GRID);
        canvas.line((gx, y0), (gx, y0 + 6), AXIS);
        canvas.line((x0 - 6, gy), (x0, gy), AXIS);
    }
    canvas.line((x0, y0), (x1, y0), AXIS);
    canvas.line((x0, y0), (x0, y1), AXIS);

    let span = |f: fn(&(f64, f64)) -> f64| {
        let m = points.iter().map(f).map(f64::abs).fold(0.0, f64::max);
        if m > 0.0 {
            m
        } else {
            1.0
        }
    };
    let (dmax, fmax) = (span(|p| p.0), span(|p| p.1));
    let map = |&(d, f): &(f64, f64)| {
        let px = x0 as f64 + (x1 - x0) as f64 * (d.abs() / dmax);
        let py = y0 as f64 + (y1 - y0) as f64 * (f / fmax);
        (px.round() as i64, py.round() as i64)
    };
    let mut prev = map(&(0.0, 0.0));
    for p in points {
        let next = map(p);
        canvas.thick_line(prev, next, CURVE);
        prev = next;
    }
    if let Some((_, d, f)) = super::export::peak(points) {
        let (px, py) = map(&(d, f));
        for oy in -3..=3 {
            for ox in -3..=3 {
                canvas.put(px + ox, py + oy, PEAK);
            }
        }
    }
    canvas.pixels
}

pub fn write_curve_png(path: &Path, points: &[(f64, f64)]) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut encoder = png::Encoder::new(BufWriter::new(file), WIDTH as u32, HEIGHT as u32);
    encoder.set_color(png::ColorType::Rgb);
    encoder.set_depth(png::BitDepth::Eight);
    let png_err = |e: png::EncodingError| Error::Io(std::io::Error::other(e));
    let mut writer = encoder.write_header().map_err(png_err)?;
    writer.write_image_data(&render_curve(points)).map_err(png_err)?;
    writer.finish().map_err(png_err)?;
    Ok(())
}
