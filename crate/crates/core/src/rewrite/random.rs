use rand::Rng;

use crate::error::{Error, Result};
use crate::matfq::Matrix;

/// Product replacement with an accumulator ("rattle"): slots start as
/// copies of the generators, each step multiplies one slot by another and
/// folds it into the accumulator.
#[derive(Clone, Debug)]
pub struct ProductReplacement {
    slots: Vec<Matrix>,
    acc: Matrix,
}

const MIN_SLOTS: usize = 10;
const SCRAMBLE_STEPS: usize = 50;

impl ProductReplacement {
    pub fn new<R: Rng + ?Sized>(generators: &[Matrix], rng: &mut R) -> Result<Self> {
        let first = generators
            .first()
            .ok_or_else(|| Error::InvalidInput("no generators".into()))?;
        if generators
            .iter()
            .any(|g| g.rows() != first.rows() || g.cols() != first.cols() || g.field() != first.field())
        {
            return Err(Error::ShapeMismatch("generators differ in shape or field".into()));
        }
        let n = generators.len().max(MIN_SLOTS);
        let slots = (0..n).map(|i| generators[i % generators.len()].clone()).collect();
        let acc = Matrix::identity(first.field(), first.rows());
        let mut pr = ProductReplacement { slots, acc };
        for _ in 0..SCRAMBLE_STEPS {
            pr.step(rng);
        }
        Ok(pr)
    }

    fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let n = self.slots.len();
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let prod = if rng.gen_bool(0.5) {
            self.slots[i].mul(&self.slots[j])
        } else {
            self.slots[j].mul(&self.slots[i])
        };
        self.slots[i] = prod.expect("equal shapes");
        self.acc = self.acc.mul(&self.slots[i]).expect("equal shapes");
    }

    pub fn next_element<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Matrix {
        self.step(rng);
        self.acc.clone()
    }
}

/// One product-replacement sample from a fresh walk.
pub fn random_element<R: Rng + ?Sized>(generators: &[Matrix], rng: &mut R) -> Result<Matrix> {
    let mut pr = ProductReplacement::new(generators, rng)?;
    Ok(pr.next_element(rng))
}

/// A uniformly chosen word `x_{i1} ⋯ x_{ik}` with `k` in `range`, as its
/// index list.
pub fn random_word<R: Rng + ?Sized>(
    n_generators: usize,
    range: (usize, usize),
    rng: &mut R,
) -> Vec<usize> {
    let len = rng.gen_range(range.0..=range.1.max(range.0));
    (0..len).map(|_| rng.gen_range(0..n_generators)).collect()
}

pub fn evaluate_word(word: &[usize], mats: &[Matrix]) -> Result<Matrix> {
    let first = mats.first().ok_or_else(|| Error::InvalidInput("no matrices".into()))?;
    word.iter().try_fold(Matrix::identity(first.field(), first.rows()), |acc, &i| acc.mul(&mats[i]))
}
