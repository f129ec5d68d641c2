//! Bit-packed binary images and NetPBM I/O.
//!
//! Pixels are addressed 1-based as `(qx, qy)` in `[1, w] x [1, h]`; pixel
//! `(qx, qy)` covers the square `[qx - 1/2, qx + 1/2] x [qy - 1/2, qy + 1/2]`
//! of the pixel frame. Bits are stored row-major (`qy` major), index
//! `(qy - 1) * w + (qx - 1)`, least significant bit first within each `u64`.

use std::io::Write;

use rand::seq::index;
use rand::Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryImage {
    width: usize,
    height: usize,
    words: Vec<u64>,
}

fn word_count(bits: usize) -> usize {
    bits.div_ceil(64)
}

impl BinaryImage {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            words: vec![0; word_count(width * height)],
        }
    }

    pub fn filled(width: usize, height: usize) -> Self {
        let mut img = Self::new(width, height);
        img.words.iter_mut().for_each(|w| *w = u64::MAX);
        img.clear_padding();
        img
    }

    /// Rebuilds an image from packed words; padding bits must be zero.
    pub fn from_words(width: usize, height: usize, words: Vec<u64>) -> Result<Self> {
        if words.len() != word_count(width * height) {
            return Err(Error::ImageFormat(format!(
                "{} words for a {width}x{height} image",
                words.len()
            )));
        }
        let img = Self {
            width,
            height,
            words,
        };
        let mut check = img.clone();
        check.clear_padding();
        if check != img {
            return Err(Error::ImageFormat("nonzero padding bits".into()));
        }
        Ok(img)
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut img = Self::new(width, height);
        for qy in 1..=height {
            for qx in 1..=width {
                if f(qx, qy) {
                    img.set(qx, qy, true);
                }
            }
        }
        img
    }

    fn clear_padding(&mut self) {
        let bits = self.width * self.height;
        if !bits.is_multiple_of(64) {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << (bits % 64)) - 1;
            }
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    fn index(&self, qx: usize, qy: usize) -> usize {
        debug_assert!(self.in_bounds(qx as i64, qy as i64));
        (qy - 1) * self.width + (qx - 1)
    }

    pub fn in_bounds(&self, qx: i64, qy: i64) -> bool {
        qx >= 1 && qy >= 1 && qx <= self.width as i64 && qy <= self.height as i64
    }

    pub fn get(&self, qx: usize, qy: usize) -> bool {
        let i = self.index(qx, qy);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    /// Like [`Self::get`], but pixels outside the image read as off.
    pub fn get_signed(&self, qx: i64, qy: i64) -> bool {
        self.in_bounds(qx, qy) && self.get(qx as usize, qy as usize)
    }

    pub fn set(&mut self, qx: usize, qy: usize, on: bool) {
        let i = self.index(qx, qy);
        if on {
            self.words[i / 64] |= 1 << (i % 64);
        } else {
            self.words[i / 64] &= !(1 << (i % 64));
        }
    }

    pub fn flip(&mut self, qx: usize, qy: usize) {
        let i = self.index(qx, qy);
        self.words[i / 64] ^= 1 << (i % 64);
    }

    /// Sets every pixel of the inclusive 1-based rectangle.
    pub fn fill_rect(&mut self, x0: usize, y0: usize, x1: usize, y1: usize) {
        for qy in y0..=y1 {
            for qx in x0..=x1 {
                self.set(qx, qy, true);
            }
        }
    }

    fn check_shape(&self, other: &Self) {
        assert!(
            self.width == other.width && self.height == other.height,
            "image shapes differ: {}x{} vs {}x{}",
            self.width,
            self.height,
            other.width,
            other.height
        );
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_blank(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn or_assign(&mut self, other: &Self) {
        self.check_shape(other);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn or(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.or_assign(other);
        out
    }

    pub fn and(&self, other: &Self) -> Self {
        self.check_shape(other);
        Self {
            width: self.width,
            height: self.height,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    /// Pixels on in `self` and off in `other`.
    pub fn and_not(&self, other: &Self) -> Self {
        self.check_shape(other);
        Self {
            width: self.width,
            height: self.height,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & !b)
                .collect(),
        }
    }

    /// Number of pixels on in `self` and off in `other`.
    pub fn count_and_not(&self, other: &Self) -> usize {
        self.check_shape(other);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & !b).count_ones() as usize)
            .sum()
    }

    pub fn intersects(&self, other: &Self) -> bool {
        self.check_shape(other);
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.count_and_not(other) == 0
    }

    /// On-pixels as 1-based `(qx, qy)` in storage order.
    pub fn on_pixels(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (wi, &word) in self.words.iter().enumerate() {
            let mut w = word;
            while w != 0 {
                let i = wi * 64 + w.trailing_zeros() as usize;
                out.push((i % self.width + 1, i / self.width + 1));
                w &= w - 1;
            }
        }
        out
    }

    /// Number of on 8-neighbors of `(qx, qy)`.
    pub fn on_neighbors(&self, qx: usize, qy: usize) -> usize {
        let mut n = 0;
        for dy in -1..=1i64 {
            for dx in -1..=1i64 {
                if (dx, dy) != (0, 0) && self.get_signed(qx as i64 + dx, qy as i64 + dy) {
                    n += 1;
                }
            }
        }
        n
    }

    /// Removes on-pixels without on 8-neighbors until none remain.
    pub fn denoise(&self) -> Self {
        let mut img = self.clone();
        loop {
            let isolated: Vec<(usize, usize)> = img
                .on_pixels()
                .into_iter()
                .filter(|&(x, y)| img.on_neighbors(x, y) == 0)
                .collect();
            if isolated.is_empty() {
                return img;
            }
            for (x, y) in isolated {
                img.set(x, y, false);
            }
        }
    }

    /// Flips `mu` distinct random pixels, except that protected on-pixels
    /// are never turned off. The result differs from `self` in at most
    /// `mu` pixels.
    pub fn apply_noise<R: Rng + ?Sized>(&self, mu: usize, rng: &mut R, protected: &Self) -> Self {
        self.check_shape(protected);
        let total = self.width * self.height;
        let mut out = self.clone();
        for i in index::sample(rng, total, mu.min(total)) {
            let (qx, qy) = (i % self.width + 1, i / self.width + 1);
            if out.get(qx, qy) && protected.get(qx, qy) {
                continue;
            }
            out.flip(qx, qy);
        }
        out
    }

    /// ASCII NetPBM (`P1`); `1` marks an on-pixel.
    pub fn to_pbm_ascii(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.width * self.height * 2 + 32);
        let _ = writeln!(out, "P1\n{} {}", self.width, self.height);
        for qy in 1..=self.height {
            let row: Vec<&str> = (1..=self.width)
                .map(|qx| if self.get(qx, qy) { "1" } else { "0" })
                .collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        out
    }

    /// Binary NetPBM (`P4`), rows padded to whole bytes, MSB first.
    pub fn to_pbm_binary(&self) -> Vec<u8> {
        let row_bytes = self.width.div_ceil(8);
        let mut out = Vec::with_capacity(row_bytes * self.height + 32);
        let _ = write!(out, "P4\n{} {}\n", self.width, self.height);
        for qy in 1..=self.height {
            let mut row = vec![0u8; row_bytes];
            for qx in 1..=self.width {
                if self.get(qx, qy) {
                    row[(qx - 1) / 8] |= 0x80 >> ((qx - 1) % 8);
                }
            }
            out.extend_from_slice(&row);
        }
        out
    }

    /// Parses `P1` or `P4` data.
    pub fn from_pbm(data: &[u8]) -> Result<Self> {
        let mut cur = PbmCursor { data, pos: 0 };
        let magic = cur.token()?;
        let width = cur.number()?;
        let height = cur.number()?;
        let mut img = Self::new(width, height);
        match magic.as_str() {
            "P1" => {
                for qy in 1..=height {
                    for qx in 1..=width {
                        match cur.bit()? {
                            b'1' => img.set(qx, qy, true),
                            b'0' => {}
                            c => {
                                return Err(Error::ImageFormat(format!(
                                    "unexpected byte {c:#x} in P1 data"
                                )))
                            }
                        }
                    }
                }
            }
            "P4" => {
                // exactly one whitespace byte separates header and raster
                cur.pos += 1;
                let row_bytes = width.div_ceil(8);
                let raster = data
                    .get(cur.pos..cur.pos + row_bytes * height)
                    .ok_or_else(|| Error::ImageFormat("truncated P4 raster".into()))?;
                for qy in 1..=height {
                    let row = &raster[(qy - 1) * row_bytes..qy * row_bytes];
                    for qx in 1..=width {
                        if row[(qx - 1) / 8] & (0x80 >> ((qx - 1) % 8)) != 0 {
                            img.set(qx, qy, true);
                        }
                    }
                }
            }
            other => return Err(Error::ImageFormat(format!("unsupported magic {other:?}"))),
        }
        Ok(img)
    }

    pub fn save_pbm(&self, path: &std::path::Path, binary: bool) -> Result<()> {
        let bytes = if binary {
            self.to_pbm_binary()
        } else {
            self.to_pbm_ascii()
        };
        std::fs::write(path, bytes)?;
        Ok(())
    }

    pub fn load_pbm(path: &std::path::Path) -> Result<Self> {
        Self::from_pbm(&std::fs::read(path)?)
    }
}

struct PbmCursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl PbmCursor<'_> {
    fn skip_space(&mut self) {
        while let Some(&c) = self.data.get(self.pos) {
            if c == b'#' {
                while self.data.get(self.pos).is_some_and(|&c| c != b'\n') {
                    self.pos += 1;
                }
            } else if c.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn token(&mut self) -> Result<String> {
        self.skip_space();
        let start = self.pos;
        while self
            .data
            .get(self.pos)
            .is_some_and(|c| !c.is_ascii_whitespace())
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::ImageFormat("unexpected end of header".into()));
        }
        Ok(String::from_utf8_lossy(&self.data[start..self.pos]).into_owned())
    }

    fn number(&mut self) -> Result<usize> {
        let t = self.token()?;
        t.parse()
            .map_err(|_| Error::ImageFormat(format!("bad header number {t:?}")))
    }

    fn bit(&mut self) -> Result<u8> {
        self.skip_space();
        let c = *self
            .data
            .get(self.pos)
            .ok_or_else(|| Error::ImageFormat("truncated P1 data".into()))?;
        self.pos += 1;
        Ok(c)
    }
}
