//! Word-parallel synchronous update.
//!
//! Each step copies the state into a padded buffer whose margins hold the
//! boundary condition (wrapped rows for a torus, zeros or the virtual
//! half-plane for a rectangle). Every distinct rule offset is then read as a
//! shifted view of the padded rows, 64 sites per word, and
//! `next = cur | OR_rules AND_offsets shifted(offset)`.

use ubp_geometry::{dot, Site, UpdateFamily};

use crate::lattice::{Boundary, Lattice, Mode, Word};

/// Update family lowered to distinct shifts plus per-rule index lists.
#[derive(Clone, Debug)]
pub struct CompiledFamily {
    family: UpdateFamily,
    offsets: Vec<Site>,
    rules: Vec<Vec<usize>>,
    range: usize,
}

impl CompiledFamily {
    pub fn new(family: &UpdateFamily) -> CompiledFamily {
        let offsets = family.all_offsets();
        let rules = family
            .rules()
            .iter()
            .map(|r| {
                r.iter()
                    .map(|s| offsets.binary_search(s).expect("offset listed"))
                    .collect()
            })
            .collect();
        CompiledFamily {
            family: family.clone(),
            offsets,
            rules,
            range: family.range() as usize,
        }
    }

    pub fn family(&self) -> &UpdateFamily {
        &self.family
    }

    pub fn range(&self) -> usize {
        self.range
    }
}

struct Padded {
    mode: Mode,
    /// Margin in sites and rows; equals the family range.
    margin: usize,
    /// Whole words of left margin; the interior starts at bit `64 * mw`.
    mw: usize,
    /// Words per padded row.
    pw: usize,
    rows: Vec<Word>,
}

impl Padded {
    fn new(lat: &Lattice, margin: usize) -> Padded {
        let mw = margin.div_ceil(64).max(1);
        let pw = mw + lat.words_per_row() + mw + 1;
        let mut p = Padded {
            mode: lat.mode(),
            margin,
            mw,
            pw,
            rows: vec![0; pw * (lat.height() + 2 * margin)],
        };
        if let Mode::Rect {
            boundary: Boundary::VirtualHalfPlane(_),
            ..
        } = lat.mode()
        {
            p.fill_static_margin(lat);
        }
        p
    }

    fn set_bit(&mut self, prow: usize, pcol: usize, v: bool) {
        let w = &mut self.rows[prow * self.pw + pcol / 64];
        if v {
            *w |= 1 << (pcol % 64);
        } else {
            *w &= !(1 << (pcol % 64));
        }
    }

    fn fill_static_margin(&mut self, lat: &Lattice) {
        let (m, base) = (self.margin as i64, 64 * self.mw as i64);
        let (w, h) = (lat.width() as i64, lat.height() as i64);
        let (u, origin) = match lat.mode() {
            Mode::Rect {
                boundary: Boundary::VirtualHalfPlane(u),
                origin,
                ..
            } => (u, origin),
            _ => return,
        };
        for r in -m..h + m {
            for c in -m..w + m {
                if (0..w).contains(&c) && (0..h).contains(&r) {
                    continue;
                }
                let p = (c - origin.0, r - origin.1);
                self.set_bit((r + m) as usize, (base + c) as usize, dot(p, u.as_site()) < 0);
            }
        }
    }

    fn load(&mut self, lat: &Lattice) {
        let (m, mw, pw, wpr) = (self.margin, self.mw, self.pw, lat.words_per_row());
        let tail = lat.tail_mask();
        let src = lat.words();
        for r in 0..lat.height() {
            let dst = &mut self.rows[(r + m) * pw + mw..(r + m) * pw + mw + wpr];
            dst[..wpr - 1].copy_from_slice(&src[r * wpr..r * wpr + wpr - 1]);
            dst[wpr - 1] = (src[r * wpr + wpr - 1] & tail) | (dst[wpr - 1] & !tail);
        }
        if let Mode::Torus(n) = lat.mode() {
            let base = 64 * mw;
            for r in 0..n {
                for k in 1..=m {
                    let left = lat.get_cell((n - k % n) % n, r);
                    self.set_bit(r + m, base - k, left);
                    let right = lat.get_cell((k - 1) % n, r);
                    self.set_bit(r + m, base + n - 1 + k, right);
                }
            }
            for pr in (0..m).chain(n + m..n + 2 * m) {
                let from = ((pr as i64 - m as i64).rem_euclid(n as i64)) as usize + m;
                self.rows.copy_within(from * pw..(from + 1) * pw, pr * pw);
            }
        }
    }
}

/// Reusable scratch for stepping lattices with one compiled family.
pub struct Stepper<'a> {
    family: &'a CompiledFamily,
    pad: Option<Padded>,
    next: Vec<Word>,
    shifted: Vec<Word>,
}

impl<'a> Stepper<'a> {
    pub fn new(family: &'a CompiledFamily) -> Stepper<'a> {
        Stepper {
            family,
            pad: None,
            next: Vec::new(),
            shifted: Vec::new(),
        }
    }

    /// Advances one generation in place; returns whether any site changed.
    pub fn step(&mut self, lat: &mut Lattice) -> bool {
        let f = self.family;
        let needs_new = match &self.pad {
            Some(p) => p.mode != lat.mode(),
            None => true,
        };
        if needs_new {
            self.pad = Some(Padded::new(lat, f.range));
        }
        let pad = self.pad.as_mut().expect("prepared");
        pad.load(lat);

        let (wpr, h, m, pw) = (lat.words_per_row(), lat.height(), pad.margin, pad.pw);
        let tail = lat.tail_mask();
        let k = f.offsets.len();
        self.shifted.resize(k * wpr, 0);
        self.next.resize(lat.words().len(), 0);
        let cur = lat.words();
        let base = 64 * pad.mw;
        let mut changed = false;
        for r in 0..h {
            for (i, &(dx, dy)) in f.offsets.iter().enumerate() {
                let prow = (r as i64 + m as i64 + dy) as usize;
                let row = &pad.rows[prow * pw..(prow + 1) * pw];
                let start = (base as i64 + dx) as usize;
                let (q, s) = (start / 64, start % 64);
                let out = &mut self.shifted[i * wpr..(i + 1) * wpr];
                if s == 0 {
                    out.copy_from_slice(&row[q..q + wpr]);
                } else {
                    for (j, o) in out.iter_mut().enumerate() {
                        *o = (row[q + j] >> s) | (row[q + j + 1] << (64 - s));
                    }
                }
            }
            for j in 0..wpr {
                let mut acc: Word = 0;
                for rule in &f.rules {
                    let mut t: Word = !0;
                    for &i in rule {
                        t &= self.shifted[i * wpr + j];
                    }
                    acc |= t;
                }
                let old = cur[r * wpr + j];
                let mut new = old | acc;
                if j == wpr - 1 {
                    new &= tail;
                }
                changed |= new != old;
                self.next[r * wpr + j] = new;
            }
        }
        lat.swap_words(&mut self.next);
        lat.set_generation(lat.generation() + 1);
        changed
    }
}

/// One synchronous generation.
pub fn step(lat: &Lattice, family: &CompiledFamily) -> Lattice {
    let mut out = lat.clone();
    Stepper::new(family).step(&mut out);
    out
}
