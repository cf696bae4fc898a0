//! 8-bit grayscale heatmaps in binary PGM (`P5`).

use std::io::Write;

use crate::types::SymmetricMatrix;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Heatmap {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
    /// All entries were equal, so every pixel is 0.
    pub degenerate: bool,
}

impl Heatmap {
    /// Min-max scales `m` to `0..=255`, with rows and columns taken in
    /// `order`.
    pub fn from_matrix<M: SymmetricMatrix + ?Sized>(m: &M, order: &[usize]) -> Self {
        let n = order.len();
        let values: Vec<f64> = order
            .iter()
            .flat_map(|&i| order.iter().map(move |&j| m.get(i, j)))
            .collect();
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let degenerate = !(hi > lo);
        let pixels = values
            .iter()
            .map(|&v| {
                if degenerate {
                    0
                } else {
                    (255.0 * (v - lo) / (hi - lo)).round().clamp(0.0, 255.0) as u8
                }
            })
            .collect();
        Self {
            width: n,
            height: n,
            pixels,
            degenerate,
        }
    }

    pub fn pixel(&self, row: usize, col: usize) -> u8 {
        self.pixels[row * self.width + col]
    }

    pub fn write_pgm<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        write!(w, "P5\n{} {}\n255\n", self.width, self.height)?;
        w.write_all(&self.pixels)?;
        w.flush()
    }

    /// Parses a binary PGM with maxval 255.
    pub fn read_pgm(bytes: &[u8]) -> Option<Self> {
        let mut fields = Vec::new();
        let mut pos = 0;
        while fields.len() < 4 {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            let start = pos;
            while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if start == pos {
                return None;
            }
            fields.push(std::str::from_utf8(&bytes[start..pos]).ok()?.to_owned());
        }
        if fields[0] != "P5" || fields[3] != "255" {
            return None;
        }
        let width: usize = fields[1].parse().ok()?;
        let height: usize = fields[2].parse().ok()?;
        let pixels = bytes.get(pos + 1..)?.to_vec();
        (pixels.len() == width * height).then_some(Self {
            width,
            height,
            pixels,
            degenerate: false,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::DissimilarityMatrix;

    #[test]
    fn scales_and_writes() {
        let d = DissimilarityMatrix::from_condensed(3, &[1.0, 2.0, 4.0]).unwrap();
        let h = Heatmap::from_matrix(&d, &[0, 1, 2]);
        assert_eq!(h.pixel(0, 0), 0);
        assert_eq!(h.pixel(1, 2), 255);
        assert_eq!(h.pixel(0, 2), 128);
        let mut buf = Vec::new();
        h.write_pgm(&mut buf).unwrap();
        assert!(buf.starts_with(b"P5\n3 3\n255\n"));
        assert_eq!(buf.len(), 11 + 9);
        assert_eq!(Heatmap::read_pgm(&buf).unwrap().pixels, h.pixels);
    }

    #[test]
    fn reorders() {
        let d = DissimilarityMatrix::from_condensed(3, &[1.0, 2.0, 4.0]).unwrap();
        let h = Heatmap::from_matrix(&d, &[2, 1, 0]);
        assert_eq!(h.pixel(0, 1), 255);
    }

    #[test]
    fn constant_matrix_is_degenerate() {
        let g = crate::types::GramMatrix::from_full(2, vec![1.0; 4]).unwrap();
        let h = Heatmap::from_matrix(&g, &[0, 1]);
        assert!(h.degenerate);
        assert!(h.pixels.iter().all(|&p| p == 0));
    }
}
