use std::marker::PhantomData;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use super::GridSpec;

/// Grid location of a scalar field, as an offset in units of `h`.
pub trait Centering: Copy + Send + Sync + 'static {
    const OFFSET: (f64, f64);
    const NAME: &'static str;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cell;
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Node;
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct XEdge;
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct YEdge;

impl Centering for Cell {
    const OFFSET: (f64, f64) = (0.5, 0.5);
    const NAME: &'static str = "cell";
}
impl Centering for Node {
    const OFFSET: (f64, f64) = (0.0, 0.0);
    const NAME: &'static str = "node";
}
impl Centering for XEdge {
    const OFFSET: (f64, f64) = (0.0, 0.5);
    const NAME: &'static str = "x-edge";
}
impl Centering for YEdge {
    const OFFSET: (f64, f64) = (0.5, 0.0);
    const NAME: &'static str = "y-edge";
}

/// Periodic scalar field on an `N x N` grid, stored with `i` (x index)
/// fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct Field<C> {
    n: usize,
    data: Vec<f64>,
    _centering: PhantomData<C>,
}

pub type CellField = Field<Cell>;
pub type NodeField = Field<Node>;

impl<C: Centering> Field<C> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
            _centering: PhantomData,
        }
    }

    pub fn constant(n: usize, value: f64) -> Self {
        Self {
            n,
            data: vec![value; n * n],
            _centering: PhantomData,
        }
    }

    pub fn from_vec(n: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), n * n, "field data must hold n*n values");
        Self {
            n,
            data,
            _centering: PhantomData,
        }
    }

    /// Sample `f(x, y)` at this centering's grid locations.
    pub fn from_fn(grid: &GridSpec, f: impl Fn(f64, f64) -> f64) -> Self {
        let n = grid.n();
        let h = grid.h();
        let (ox, oy) = C::OFFSET;
        let mut data = Vec::with_capacity(n * n);
        for j in 0..n {
            for i in 0..n {
                data.push(f((i as f64 + ox) * h, (j as f64 + oy) * h));
            }
        }
        Self {
            n,
            data,
            _centering: PhantomData,
        }
    }

    /// Physical location of index `(i, j)`.
    pub fn location(grid: &GridSpec, i: usize, j: usize) -> (f64, f64) {
        let (ox, oy) = C::OFFSET;
        ((i as f64 + ox) * grid.h(), (j as f64 + oy) * grid.h())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    /// Value at possibly out-of-range indices, wrapped periodically.
    #[inline]
    pub fn get(&self, i: isize, j: isize) -> f64 {
        let n = self.n as isize;
        self.data[(j.rem_euclid(n) * n + i.rem_euclid(n)) as usize]
    }

    #[inline]
    pub fn add_at(&mut self, i: isize, j: isize, value: f64) {
        let n = self.n as isize;
        self.data[(j.rem_euclid(n) * n + i.rem_euclid(n)) as usize] += value;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    /// Plain sum of pointwise products (no `h^2` factor).
    pub fn dot(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_vec(self.n, self.data.iter().map(|&v| f(v)).collect())
    }

    /// `self += a * other`
    pub fn axpy(&mut self, a: f64, other: &Self) {
        self.data.iter_mut().zip(&other.data).for_each(|(s, o)| *s += a * o);
    }

    pub fn subtract_mean(&mut self) {
        let m = self.mean();
        self.data.iter_mut().for_each(|v| *v -= m);
    }
}

impl<C> Index<(usize, usize)> for Field<C> {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[j * self.n + i]
    }
}

impl<C> IndexMut<(usize, usize)> for Field<C> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[j * self.n + i]
    }
}

impl<C: Centering> Add for &Field<C> {
    type Output = Field<C>;
    fn add(self, rhs: Self) -> Field<C> {
        Field::from_vec(self.n, self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect())
    }
}

impl<C: Centering> Sub for &Field<C> {
    type Output = Field<C>;
    fn sub(self, rhs: Self) -> Field<C> {
        Field::from_vec(self.n, self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect())
    }
}

impl<C: Centering> Mul<f64> for &Field<C> {
    type Output = Field<C>;
    fn mul(self, rhs: f64) -> Field<C> {
        self.map(|v| v * rhs)
    }
}

/// MAC velocity (or force) field: `u` on x-edges, `v` on y-edges.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeVectorField {
    pub u: Field<XEdge>,
    pub v: Field<YEdge>,
}

impl EdgeVectorField {
    pub fn zeros(n: usize) -> Self {
        Self {
            u: Field::zeros(n),
            v: Field::zeros(n),
        }
    }

    pub fn constant(n: usize, a: f64, b: f64) -> Self {
        Self {
            u: Field::constant(n, a),
            v: Field::constant(n, b),
        }
    }

    /// Sample a continuous vector field at the edge centers.
    pub fn from_fn(grid: &GridSpec, f: impl Fn(f64, f64) -> (f64, f64)) -> Self {
        Self {
            u: Field::from_fn(grid, |x, y| f(x, y).0),
            v: Field::from_fn(grid, |x, y| f(x, y).1),
        }
    }

    pub fn n(&self) -> usize {
        self.u.n()
    }

    pub fn max_abs(&self) -> f64 {
        self.u.max_abs().max(self.v.max_abs())
    }

    /// Largest pointwise magnitude, pairing each x-edge with the averaged
    /// y-edge values around it.
    pub fn max_magnitude(&self) -> f64 {
        let n = self.n() as isize;
        let mut m: f64 = 0.0;
        for j in 0..n {
            for i in 0..n {
                let u = self.u.get(i, j);
                let v =
                    0.25 * (self.v.get(i - 1, j) + self.v.get(i, j) + self.v.get(i - 1, j + 1) + self.v.get(i, j + 1));
                m = m.max(u.hypot(v));
            }
        }
        m
    }

    /// Sum over both components of pointwise products (no `h^2` factor).
    pub fn dot(&self, other: &Self) -> f64 {
        self.u.dot(&other.u) + self.v.dot(&other.v)
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.v.is_finite()
    }

    pub fn axpy(&mut self, a: f64, other: &Self) {
        self.u.axpy(a, &other.u);
        self.v.axpy(a, &other.v);
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self {
            u: &self.u * a,
            v: &self.v * a,
        }
    }
}

impl Add for &EdgeVectorField {
    type Output = EdgeVectorField;
    fn add(self, rhs: Self) -> EdgeVectorField {
        EdgeVectorField {
            u: &self.u + &rhs.u,
            v: &self.v + &rhs.v,
        }
    }
}

impl Sub for &EdgeVectorField {
    type Output = EdgeVectorField;
    fn sub(self, rhs: Self) -> EdgeVectorField {
        EdgeVectorField {
            u: &self.u - &rhs.u,
            v: &self.v - &rhs.v,
        }
    }
}
