//! Plain (P2) grayscale heatmaps.

use std::fmt::Write;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graymap {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl Graymap {
    pub fn new(width: usize, height: usize) -> Self {
        Graymap {
            width,
            height,
            pixels: vec![0; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Sets a pixel in image coordinates (row 0 is the top line).
    pub fn set(&mut self, col: usize, row: usize, level: u8) {
        self.pixels[row * self.width + col] = level;
    }

    pub fn get(&self, col: usize, row: usize) -> u8 {
        self.pixels[row * self.width + col]
    }

    /// Sets a pixel in lattice orientation: `y = 0` is the bottom line.
    pub fn set_cartesian(&mut self, x: usize, y: usize, level: u8) {
        let row = self.height - 1 - y;
        self.set(x, row, level);
    }

    pub fn to_p2(&self) -> String {
        let mut out = String::with_capacity(self.pixels.len() * 4 + 32);
        let _ = writeln!(out, "P2\n{} {}\n255", self.width, self.height);
        for row in self.pixels.chunks(self.width.max(1)) {
            let line: Vec<String> = row.iter().map(u8::to_string).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p2_layout() {
        let mut g = Graymap::new(2, 2);
        g.set_cartesian(0, 0, 255);
        assert_eq!(g.get(0, 1), 255);
        assert_eq!(g.to_p2(), "P2\n2 2\n255\n0 0\n255 0\n");
    }
}
