//! Binary bitmaps, rectangles and the single resampling rule used everywhere.
//!
//! Every downscaling step in the pipeline (font validation, physical
//! projection, template matching) goes through [`downscale`], so a glyph
//! collision observed during validation occurs identically during
//! recognition.

/// An exact rational scale factor (output pixels per input pixel).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Scale {
    pub num: u32,
    pub den: u32,
}

impl Scale {
    pub const ONE: Scale = Scale { num: 1, den: 1 };

    pub fn new(num: u32, den: u32) -> Scale {
        assert!(num > 0 && den > 0, "scale must be positive");
        Scale { num, den }
    }

    /// Floor of `v * num / den`; used for coordinates.
    pub fn floor(&self, v: u32) -> u32 {
        ((v as u64 * self.num as u64) / self.den as u64) as u32
    }

    /// Ceiling of `v * num / den`; used for extents.
    pub fn ceil(&self, v: u32) -> u32 {
        ((v as u64 * self.num as u64).div_ceil(self.den as u64)) as u32
    }

    /// Round-half-up of `v * num / den`, floored at 1; used for lengths
    /// that must stay visible.
    pub fn len(&self, v: u32) -> u32 {
        let r = ((v as u64 * self.num as u64 * 2 + self.den as u64) / (2 * self.den as u64)) as u32;
        r.max(1)
    }

    pub fn is_one(&self) -> bool {
        self.num == self.den
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl std::fmt::Display for Scale {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Axis-aligned pixel rectangle, `x`/`y` top-left inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rect {
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
}

impl Rect {
    pub fn new(x: u32, y: u32, w: u32, h: u32) -> Rect {
        Rect { x, y, w, h }
    }

    pub fn contains(&self, x: u32, y: u32) -> bool {
        x >= self.x && x < self.x + self.w && y >= self.y && y < self.y + self.h
    }

    pub fn intersects(&self, other: &Rect) -> bool {
        self.x < other.x + other.w
            && other.x < self.x + self.w
            && self.y < other.y + other.h
            && other.y < self.y + self.h
    }
}

impl std::fmt::Display for Rect {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{},{}+{}x{}", self.x, self.y, self.w, self.h)
    }
}

/// A binary ink bitmap. `rows[y][x]` is true where there is ink.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bitmap {
    pub width: u32,
    pub height: u32,
    rows: Vec<Vec<bool>>,
}

impl Bitmap {
    pub fn blank(width: u32, height: u32) -> Bitmap {
        Bitmap {
            width,
            height,
            rows: vec![vec![false; width as usize]; height as usize],
        }
    }

    /// Parse rows of `.` (blank) and `#` (ink). All rows must share one width.
    pub fn parse(rows: &[&str]) -> Bitmap {
        assert!(!rows.is_empty());
        let width = rows[0].len() as u32;
        let grid = rows
            .iter()
            .map(|r| {
                assert_eq!(r.len() as u32, width, "ragged bitmap row");
                r.chars().map(|c| c == '#').collect()
            })
            .collect();
        Bitmap {
            width,
            height: rows.len() as u32,
            rows: grid,
        }
    }

    pub fn get(&self, x: u32, y: u32) -> bool {
        self.rows[y as usize][x as usize]
    }

    pub fn set(&mut self, x: u32, y: u32, ink: bool) {
        self.rows[y as usize][x as usize] = ink;
    }

    pub fn ink_count(&self) -> u32 {
        self.rows
            .iter()
            .map(|r| r.iter().filter(|&&b| b).count() as u32)
            .sum()
    }

    pub fn is_blank(&self) -> bool {
        self.ink_count() == 0
    }

    /// Bounding box of the ink, or None for a blank bitmap.
    pub fn ink_bounds(&self) -> Option<Rect> {
        let mut min_x = u32::MAX;
        let mut min_y = u32::MAX;
        let mut max_x = 0u32;
        let mut max_y = 0u32;
        let mut any = false;
        for y in 0..self.height {
            for x in 0..self.width {
                if self.get(x, y) {
                    any = true;
                    min_x = min_x.min(x);
                    min_y = min_y.min(y);
                    max_x = max_x.max(x);
                    max_y = max_y.max(y);
                }
            }
        }
        any.then(|| Rect::new(min_x, min_y, max_x - min_x + 1, max_y - min_y + 1))
    }

    /// The ink pattern cropped to its bounding box; None if blank.
    pub fn cropped(&self) -> Option<Bitmap> {
        self.ink_bounds().map(|r| self.crop(&r))
    }

    pub fn crop(&self, r: &Rect) -> Bitmap {
        let mut out = Bitmap::blank(r.w, r.h);
        for y in 0..r.h {
            for x in 0..r.w {
                out.set(x, y, self.get(r.x + x, r.y + y));
            }
        }
        out
    }

    pub fn render_rows(&self) -> Vec<String> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|&b| if b { '#' } else { '.' }).collect())
            .collect()
    }
}

/// Resample a bitmap to `tw`x`th` with nearest-neighbor cells and a
/// >= 0.5 ink-coverage threshold per target cell.
pub fn downscale(src: &Bitmap, tw: u32, th: u32) -> Bitmap {
    assert!(tw > 0 && th > 0);
    let mut out = Bitmap::blank(tw, th);
    for ty in 0..th {
        let y0 = (ty as u64 * src.height as u64 / th as u64) as u32;
        let y1 = (((ty + 1) as u64 * src.height as u64 / th as u64) as u32).max(y0 + 1);
        for tx in 0..tw {
            let x0 = (tx as u64 * src.width as u64 / tw as u64) as u32;
            let x1 = (((tx + 1) as u64 * src.width as u64 / tw as u64) as u32).max(x0 + 1);
            let area = ((y1 - y0) * (x1 - x0)) as u64;
            let mut ink = 0u64;
            for y in y0..y1.min(src.height) {
                for x in x0..x1.min(src.width) {
                    if src.get(x, y) {
                        ink += 1;
                    }
                }
            }
            out.set(tx, ty, ink * 2 >= area);
        }
    }
    out
}

/// Downscale by a rational scale, rounding target dims per [`Scale::len`].
pub fn downscale_by(src: &Bitmap, scale: Scale) -> Bitmap {
    if scale.is_one() {
        return src.clone();
    }
    downscale(src, scale.len(src.width), scale.len(src.height))
}
