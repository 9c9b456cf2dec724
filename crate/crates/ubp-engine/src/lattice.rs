//! Dense bit-packed lattice state.
//!
//! Row `r`, column `c` is bit `c % 64` of word `r * words_per_row + c / 64`.
//! Bits past the last column of a row are always zero.

use ubp_geometry::{dot, Direction, Site};

pub type Word = u64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    /// Sites outside the rectangle are never infected.
    HardEmpty,
    /// Sites outside the rectangle are infected iff `⟨x,u⟩ < 0`.
    VirtualHalfPlane(Direction),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// `Z_n²`; lattice point `(x, y)` is column `x mod n`, row `y mod n`.
    Torus(usize),
    /// Lattice point `(x, y)` is column `x + origin.0`, row `y + origin.1`.
    Rect {
        width: usize,
        height: usize,
        boundary: Boundary,
        origin: (i64, i64),
    },
}

#[derive(Clone, Debug)]
pub struct Lattice {
    mode: Mode,
    width: usize,
    height: usize,
    wpr: usize,
    words: Vec<Word>,
    generation: u64,
}

impl PartialEq for Lattice {
    /// Compares mode and infected set; the generation counter is ignored.
    fn eq(&self, other: &Self) -> bool {
        self.mode == other.mode && self.words == other.words
    }
}

impl Eq for Lattice {}

impl Lattice {
    fn with_mode(mode: Mode) -> Lattice {
        let (width, height) = match mode {
            Mode::Torus(n) => (n, n),
            Mode::Rect { width, height, .. } => (width, height),
        };
        assert!(width > 0 && height > 0, "lattice must have at least one site");
        let wpr = width.div_ceil(64);
        Lattice {
            mode,
            width,
            height,
            wpr,
            words: vec![0; wpr * height],
            generation: 0,
        }
    }

    pub fn torus(n: usize) -> Lattice {
        Lattice::with_mode(Mode::Torus(n))
    }

    /// Rectangle with the lattice origin at its centre column and row.
    pub fn rect(width: usize, height: usize, boundary: Boundary) -> Lattice {
        Lattice::rect_with_origin(width, height, boundary, ((width / 2) as i64, (height / 2) as i64))
    }

    /// Rectangle whose column `origin.0`, row `origin.1` is the lattice origin.
    pub fn rect_with_origin(width: usize, height: usize, boundary: Boundary, origin: (i64, i64)) -> Lattice {
        Lattice::with_mode(Mode::Rect {
            width,
            height,
            boundary,
            origin,
        })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn words_per_row(&self) -> usize {
        self.wpr
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }

    pub(crate) fn set_generation(&mut self, g: u64) {
        self.generation = g;
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    /// Raw row words. Call [`Lattice::clear_tail_bits`] after writing past the last column.
    pub fn words_mut(&mut self) -> &mut [Word] {
        &mut self.words
    }

    pub(crate) fn swap_words(&mut self, other: &mut Vec<Word>) {
        std::mem::swap(&mut self.words, other);
    }

    pub fn tail_mask(&self) -> Word {
        match self.width % 64 {
            0 => !0,
            r => (1 << r) - 1,
        }
    }

    pub fn clear_tail_bits(&mut self) {
        let mask = self.tail_mask();
        let wpr = self.wpr;
        for row in self.words.chunks_mut(wpr) {
            row[wpr - 1] &= mask;
        }
    }

    /// Column and row of a lattice point, if it lies on the stored grid.
    pub fn cell_of(&self, p: Site) -> Option<(usize, usize)> {
        match self.mode {
            Mode::Torus(n) => {
                let n = n as i64;
                Some((p.0.rem_euclid(n) as usize, p.1.rem_euclid(n) as usize))
            }
            Mode::Rect { origin, .. } => {
                let (c, r) = (p.0 + origin.0, p.1 + origin.1);
                (c >= 0 && r >= 0 && (c as usize) < self.width && (r as usize) < self.height)
                    .then_some((c as usize, r as usize))
            }
        }
    }

    /// Lattice point stored at a column and row.
    pub fn point_of(&self, col: usize, row: usize) -> Site {
        match self.mode {
            Mode::Torus(_) => (col as i64, row as i64),
            Mode::Rect { origin, .. } => (col as i64 - origin.0, row as i64 - origin.1),
        }
    }

    pub fn get_cell(&self, col: usize, row: usize) -> bool {
        self.words[row * self.wpr + col / 64] >> (col % 64) & 1 == 1
    }

    pub fn set_cell(&mut self, col: usize, row: usize, value: bool) {
        let w = &mut self.words[row * self.wpr + col / 64];
        if value {
            *w |= 1 << (col % 64);
        } else {
            *w &= !(1 << (col % 64));
        }
    }

    /// Infection state of a lattice point, applying the boundary rule off the grid.
    pub fn get(&self, p: Site) -> bool {
        match self.cell_of(p) {
            Some((c, r)) => self.get_cell(c, r),
            None => match self.mode {
                Mode::Rect {
                    boundary: Boundary::VirtualHalfPlane(u),
                    ..
                } => dot(p, u.as_site()) < 0,
                _ => false,
            },
        }
    }

    /// Sets a lattice point; points off a rectangle are ignored and reported as `false`.
    pub fn set(&mut self, p: Site, value: bool) -> bool {
        match self.cell_of(p) {
            Some((c, r)) => {
                self.set_cell(c, r, value);
                true
            }
            None => false,
        }
    }

    pub fn from_sites<I: IntoIterator<Item = Site>>(mut self, sites: I) -> Lattice {
        for p in sites {
            self.set(p, true);
        }
        self
    }

    pub fn fill(&mut self) {
        self.words.iter_mut().for_each(|w| *w = !0);
        self.clear_tail_bits();
    }

    pub fn count(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn is_full(&self) -> bool {
        self.count() == (self.width * self.height) as u64
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Infected lattice points on the grid, row by row.
    pub fn sites(&self) -> Vec<Site> {
        let mut out = Vec::new();
        for row in 0..self.height {
            for (j, &w) in self.words[row * self.wpr..(row + 1) * self.wpr].iter().enumerate() {
                let mut bits = w;
                while bits != 0 {
                    let b = bits.trailing_zeros() as usize;
                    out.push(self.point_of(j * 64 + b, row));
                    bits &= bits - 1;
                }
            }
        }
        out
    }

    /// Whether every infected site of `self` is infected in `other`.
    pub fn is_subset(&self, other: &Lattice) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// Cyclic shift of a torus by `(dx, dy)`: the site at `p` moves to `p + (dx, dy)`.
    pub fn shifted(&self, dx: i64, dy: i64) -> Lattice {
        let mut out = Lattice::with_mode(self.mode);
        out.generation = self.generation;
        for p in self.sites() {
            out.set((p.0 + dx, p.1 + dy), true);
        }
        out
    }
}
