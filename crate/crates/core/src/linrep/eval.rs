use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::matrix::Rational;
use super::LinearRepresentation;

fn common_denominator<'a>(values: impl Iterator<Item = &'a Rational>) -> BigInt {
    values.fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

fn scaled(values: &[Rational], denom: &BigInt) -> Vec<BigInt> {
    values.iter().map(|x| (x * Rational::from_integer(denom.clone())).to_integer()).collect()
}

/// Integer-scaled sparse form of a representation for evaluating many
/// consecutive arguments.
///
/// Every matrix is stored as an integer matrix over a common denominator, so
/// the walk over n = 0, 1, 2, ... only does integer multiply-adds and one
/// reduction per output.
pub struct RangeEvaluator {
    base: u32,
    v: Vec<BigInt>,
    v_denom: BigInt,
    gamma: Vec<Vec<Vec<(usize, BigInt)>>>,
    gamma_denom: Vec<BigInt>,
    w: Vec<BigInt>,
    w_denom: BigInt,
}

impl RangeEvaluator {
    pub fn new(lr: &LinearRepresentation) -> Self {
        let v_denom = common_denominator(lr.v().iter());
        let w_denom = common_denominator(lr.w().iter());
        let mut gamma = Vec::new();
        let mut gamma_denom = Vec::new();
        for g in lr.gamma() {
            let d = common_denominator((0..g.rows()).flat_map(|i| g.row(i).iter()));
            let rows = (0..g.rows())
                .map(|i| scaled(g.row(i), &d).into_iter().enumerate().filter(|(_, x)| !x.is_zero()).collect())
                .collect();
            gamma.push(rows);
            gamma_denom.push(d);
        }
        Self {
            base: lr.base(),
            v: scaled(lr.v(), &v_denom),
            v_denom,
            gamma,
            gamma_denom,
            w: scaled(lr.w(), &w_denom),
            w_denom,
        }
    }

    fn step(&self, u: &(Vec<BigInt>, BigInt), digit: usize) -> (Vec<BigInt>, BigInt) {
        let mut out = vec![BigInt::zero(); u.0.len()];
        for (x, row) in u.0.iter().zip(&self.gamma[digit]) {
            if x.is_zero() {
                continue;
            }
            for (j, a) in row {
                out[*j] += x * a;
            }
        }
        (out, &u.1 * &self.gamma_denom[digit])
    }

    fn value(&self, u: &(Vec<BigInt>, BigInt)) -> Rational {
        let num: BigInt = u.0.iter().zip(&self.w).filter(|(x, _)| !x.is_zero()).map(|(x, y)| x * y).sum();
        Rational::new(num, &u.1 * &self.w_denom)
    }

    /// Values at n = 0, 1, ..., upto on canonical msd-first digits.
    pub fn eval_range(&self, upto: u64) -> Vec<Rational> {
        let base = self.base;
        let start = (self.v.clone(), self.v_denom.clone());
        let mut out = Vec::with_capacity(upto as usize + 1);
        out.push(self.value(&start));
        let mut digits: Vec<u32> = Vec::new();
        let mut stack = vec![start];
        for _ in 1..=upto {
            let mut pos = digits.len();
            loop {
                if pos == 0 {
                    digits.insert(0, 1);
                    break;
                }
                pos -= 1;
                if digits[pos] + 1 < base {
                    digits[pos] += 1;
                    break;
                }
                digits[pos] = 0;
            }
            stack.truncate(pos + 1);
            for &d in &digits[pos..] {
                let next = self.step(stack.last().unwrap(), d as usize);
                stack.push(next);
            }
            out.push(self.value(stack.last().unwrap()));
        }
        out
    }
}
