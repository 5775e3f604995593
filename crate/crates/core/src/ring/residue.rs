//! The finite ring O/n, with elements indexed 0..N(n) through the Hermite
//! box {x + yω : 0 ≤ x < A, 0 ≤ y < C}.

use super::{FieldId, QuadInt};
use crate::int::Int;

const TABLE_LIMIT: usize = 2048;

#[derive(Clone, Debug)]
pub struct ResidueRing {
    f: FieldId,
    modulus: QuadInt,
    a_len: i64,
    c_len: i64,
    b_off: i64,
    coords: Vec<(i64, i64)>,
    mul_table: Option<Vec<u32>>,
    inverse: Vec<Option<u32>>,
}

impl ResidueRing {
    /// Panics if n = 0 or N(n) does not fit comfortably in machine words;
    /// levels are desk-scale by design.
    pub fn new(f: FieldId, n: &QuadInt) -> ResidueRing {
        assert!(!n.is_zero(), "residue ring modulo zero");
        let (a_len, c_len, b_off) = f.lattice_hnf(n);
        let size = (&a_len * &c_len).to_i64().expect("modulus norm too large");
        assert!(size < (1 << 31), "modulus norm too large for a residue table");
        let (a_len, c_len, b_off) = (
            a_len.to_i64().unwrap(),
            c_len.to_i64().unwrap(),
            b_off.to_i64().unwrap(),
        );
        let mut coords = Vec::with_capacity(size as usize);
        for y in 0..c_len {
            for x in 0..a_len {
                coords.push((x, y));
            }
        }
        let mut ring = ResidueRing {
            f,
            modulus: n.clone(),
            a_len,
            c_len,
            b_off,
            coords,
            mul_table: None,
            inverse: Vec::new(),
        };
        let size = size as usize;
        if size <= TABLE_LIMIT {
            let mut table = vec![0u32; size * size];
            for i in 0..size {
                for j in i..size {
                    let k = ring.mul_direct(i, j) as u32;
                    table[i * size + j] = k;
                    table[j * size + i] = k;
                }
            }
            ring.mul_table = Some(table);
        }
        let mut inverse = vec![None; size];
        for (i, slot) in inverse.iter_mut().enumerate() {
            let x = ring.elem(i);
            if let Ok((g, s, _)) = f.xgcd(&x, n) {
                if f.is_unit(&g) {
                    *slot = Some(ring.reduce(&s) as u32);
                }
            }
        }
        if size == 1 {
            inverse[0] = Some(0);
        }
        ring.inverse = inverse;
        ring
    }

    pub fn field(&self) -> FieldId {
        self.f
    }

    pub fn modulus(&self) -> &QuadInt {
        &self.modulus
    }

    pub fn size(&self) -> usize {
        self.coords.len()
    }

    pub fn zero(&self) -> usize {
        0
    }

    pub fn one(&self) -> usize {
        self.reduce_i128(1, 0)
    }

    pub fn coords(&self, i: usize) -> (i64, i64) {
        self.coords[i]
    }

    pub fn elem(&self, i: usize) -> QuadInt {
        let (x, y) = self.coords[i];
        QuadInt::new(x, y)
    }

    pub fn reduce_i128(&self, x: i128, y: i128) -> usize {
        let c = self.c_len as i128;
        let a = self.a_len as i128;
        let yr = y.rem_euclid(c);
        let k = (y - yr) / c;
        let xr = (x - k * self.b_off as i128).rem_euclid(a);
        (yr * a + xr) as usize
    }

    pub fn reduce(&self, z: &QuadInt) -> usize {
        if let (Some(x), Some(y)) = (z.a.to_i64(), z.b.to_i64()) {
            return self.reduce_i128(x as i128, y as i128);
        }
        let c = Int::from(self.c_len);
        let a = Int::from(self.a_len);
        let yr = z.b.mod_floor(&c);
        let k = (&z.b - &yr).div_exact(&c);
        let xr = (&z.a - &(&k * &Int::from(self.b_off))).mod_floor(&a);
        (yr.to_i64().unwrap() * self.a_len + xr.to_i64().unwrap()) as usize
    }

    pub fn add(&self, i: usize, j: usize) -> usize {
        let (x1, y1) = self.coords[i];
        let (x2, y2) = self.coords[j];
        self.reduce_i128((x1 + x2) as i128, (y1 + y2) as i128)
    }

    pub fn sub(&self, i: usize, j: usize) -> usize {
        let (x1, y1) = self.coords[i];
        let (x2, y2) = self.coords[j];
        self.reduce_i128((x1 - x2) as i128, (y1 - y2) as i128)
    }

    pub fn neg(&self, i: usize) -> usize {
        let (x, y) = self.coords[i];
        self.reduce_i128(-(x as i128), -(y as i128))
    }

    fn mul_direct(&self, i: usize, j: usize) -> usize {
        let (x1, y1) = self.coords[i];
        let (x2, y2) = self.coords[j];
        let (x1, y1, x2, y2) = (x1 as i128, y1 as i128, x2 as i128, y2 as i128);
        let t = self.f.omega_trace() as i128;
        let m = self.f.omega_norm() as i128;
        let yy = y1 * y2;
        self.reduce_i128(x1 * x2 - m * yy, x1 * y2 + x2 * y1 + t * yy)
    }

    pub fn mul(&self, i: usize, j: usize) -> usize {
        match &self.mul_table {
            Some(t) => t[i * self.coords.len() + j] as usize,
            None => self.mul_direct(i, j),
        }
    }

    pub fn is_unit(&self, i: usize) -> bool {
        self.inverse[i].is_some()
    }

    pub fn inv(&self, i: usize) -> Option<usize> {
        self.inverse[i].map(|v| v as usize)
    }

    /// Index map from this ring onto O/m for a divisor m of the modulus.
    pub fn projection_to(&self, other: &ResidueRing) -> Vec<usize> {
        (0..self.size()).map(|i| other.reduce(&self.elem(i))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_indexing_round_trips() {
        for f in FieldId::all() {
            for n in [QuadInt::new(2, 1), QuadInt::new(3, 0), QuadInt::new(1, 2), QuadInt::new(4, -1)] {
                let r = ResidueRing::new(f, &n);
                assert_eq!(r.size() as i64, f.norm(&n).to_i64().unwrap());
                for i in 0..r.size() {
                    assert_eq!(r.reduce(&r.elem(i)), i);
                    let shifted = &r.elem(i) + &f.mul(&n, &QuadInt::new(3, -5));
                    assert_eq!(r.reduce(&shifted), i);
                }
            }
        }
    }

    #[test]
    fn table_and_direct_multiplication_agree() {
        let f = FieldId::new(7).unwrap();
        let n = QuadInt::new(5, 2);
        let r = ResidueRing::new(f, &n);
        for i in 0..r.size() {
            for j in 0..r.size() {
                let expect = r.reduce(&f.mul(&r.elem(i), &r.elem(j)));
                assert_eq!(r.mul(i, j), expect);
            }
        }
    }
}
