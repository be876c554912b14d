use num_rational::Ratio;
use once_cell::sync::OnceCell;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{check_symbols, enumerate_by_encoding, MotherCode, DEFAULT_ENUM_CAP};
use crate::error::{Error, Result};
use crate::field::{GaloisField, Symbol};
use crate::rng::rng_from_seed;

/// A linear `[n, k]` code over GF(q) given by a full-rank generator matrix.
///
/// The parity-check matrix is always materialized (computed as the null
/// space of the generator when not supplied), so membership tests are cheap.
#[derive(Debug, Clone)]
pub struct LinearCode {
    field: GaloisField,
    length: usize,
    generator: Vec<Vec<Symbol>>,
    parity: Vec<Vec<Symbol>>,
    enum_cap: u128,
    codewords: OnceCell<Vec<Vec<Symbol>>>,
    distance: OnceCell<usize>,
}

/// On-disk form: `{"q", "length", "dim", "generator"}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CodeFile {
    pub q: usize,
    pub length: usize,
    pub dim: usize,
    pub generator: Vec<Vec<Symbol>>,
}

/// Row-reduces `rows` in place; returns the pivot column of each nonzero row.
#[allow(clippy::needless_range_loop)]
fn row_reduce(field: &GaloisField, rows: &mut Vec<Vec<Symbol>>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| rows[i][col] != 0) else { continue };
        rows.swap(r, p);
        let inv = field.inv(rows[r][col]);
        for x in rows[r].iter_mut() {
            *x = field.mul(*x, inv);
        }
        for i in 0..rows.len() {
            if i != r && rows[i][col] != 0 {
                let f = rows[i][col];
                for j in 0..ncols {
                    let t = field.mul(f, rows[r][j]);
                    rows[i][j] = field.sub(rows[i][j], t);
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

/// Basis of `{x : A x^T = 0}`.
fn null_space(field: &GaloisField, a: &[Vec<Symbol>], ncols: usize) -> Vec<Vec<Symbol>> {
    let mut rows = a.to_vec();
    let pivots = row_reduce(field, &mut rows, ncols);
    let mut is_pivot = vec![false; ncols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    (0..ncols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut x = vec![0; ncols];
            x[free] = 1;
            for (row, &p) in rows.iter().zip(&pivots) {
                x[p] = field.neg(row[free]);
            }
            x
        })
        .collect()
}

pub(crate) fn rank(field: &GaloisField, a: &[Vec<Symbol>], ncols: usize) -> usize {
    let mut rows = a.to_vec();
    row_reduce(field, &mut rows, ncols).len()
}

impl LinearCode {
    pub fn from_generator(q: usize, length: usize, generator: Vec<Vec<Symbol>>) -> Result<Self> {
        let field = GaloisField::new(q)?;
        if length == 0 {
            return Err(Error::MalformedCode("code length must be positive".into()));
        }
        for row in &generator {
            if row.len() != length {
                return Err(Error::LengthMismatch { expected: length, found: row.len() });
            }
            check_symbols(row, q)?;
        }
        if rank(&field, &generator, length) != generator.len() {
            return Err(Error::MalformedCode("generator rows are linearly dependent".into()));
        }
        let parity = null_space(&field, &generator, length);
        Ok(Self::assemble(field, length, generator, parity))
    }

    /// The code `{x : H x^T = 0}`.
    pub fn from_parity(q: usize, length: usize, parity: Vec<Vec<Symbol>>) -> Result<Self> {
        let field = GaloisField::new(q)?;
        if length == 0 {
            return Err(Error::MalformedCode("code length must be positive".into()));
        }
        for row in &parity {
            if row.len() != length {
                return Err(Error::LengthMismatch { expected: length, found: row.len() });
            }
            check_symbols(row, q)?;
        }
        let generator = null_space(&field, &parity, length);
        let parity = null_space(&field, &generator, length);
        Ok(Self::assemble(field, length, generator, parity))
    }

    fn assemble(field: GaloisField, length: usize, generator: Vec<Vec<Symbol>>, parity: Vec<Vec<Symbol>>) -> Self {
        LinearCode {
            field,
            length,
            generator,
            parity,
            enum_cap: DEFAULT_ENUM_CAP,
            codewords: OnceCell::new(),
            distance: OnceCell::new(),
        }
    }

    /// A uniformly random full-rank `[n, k]` code.
    pub fn random(q: usize, length: usize, dim: usize, seed: u64) -> Result<Self> {
        if dim > length {
            return Err(Error::param(format!("dimension {dim} exceeds length {length}")));
        }
        let field = GaloisField::new(q)?;
        let mut rng = rng_from_seed(seed);
        for _ in 0..1000 {
            let g: Vec<Vec<Symbol>> =
                (0..dim).map(|_| (0..length).map(|_| rng.gen_range(0..q as Symbol)).collect()).collect();
            if rank(&field, &g, length) == dim {
                return Self::from_generator(q, length, g);
            }
        }
        Err(Error::BudgetExhausted("no full-rank generator sampled".into()))
    }

    /// Best of `attempts` random codes by minimum distance.
    pub fn random_best_distance(q: usize, length: usize, dim: usize, attempts: usize, seed: u64) -> Result<Self> {
        let mut best: Option<(usize, LinearCode)> = None;
        for a in 0..attempts.max(1) as u64 {
            let c = Self::random(q, length, dim, crate::rng::derive_seed(seed, &[a]))?;
            let d = c.min_weight()?;
            if best.as_ref().is_none_or(|(bd, _)| d > *bd) {
                best = Some((d, c));
            }
        }
        Ok(best.unwrap().1)
    }

    /// Repetition code of length `n` over GF(q).
    pub fn repetition(q: usize, n: usize) -> Result<Self> {
        Self::from_generator(q, n, vec![vec![1; n]])
    }

    pub fn with_enum_cap(mut self, cap: u128) -> Self {
        self.enum_cap = cap;
        self.codewords = OnceCell::new();
        self
    }

    pub fn field(&self) -> &GaloisField {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.generator.len()
    }

    pub fn generator(&self) -> &[Vec<Symbol>] {
        &self.generator
    }

    pub fn parity(&self) -> &[Vec<Symbol>] {
        &self.parity
    }

    pub fn syndrome(&self, word: &[Symbol]) -> Vec<Symbol> {
        self.parity
            .iter()
            .map(|h| h.iter().zip(word).fold(0, |acc, (&a, &b)| self.field.add(acc, self.field.mul(a, b))))
            .collect()
    }

    /// Minimum nonzero codeword weight, by enumeration.
    pub fn min_weight(&self) -> Result<usize> {
        self.distance
            .get_or_try_init(|| {
                let words = self.codewords()?;
                Ok(words
                    .iter()
                    .map(|c| c.iter().filter(|&&s| s != 0).count())
                    .filter(|&w| w > 0)
                    .min()
                    .unwrap_or(self.length + 1))
            })
            .copied()
    }

    pub fn to_file(&self) -> CodeFile {
        CodeFile { q: self.field.order(), length: self.length, dim: self.dim(), generator: self.generator.clone() }
    }

    pub fn from_file(file: CodeFile) -> Result<Self> {
        if file.generator.len() != file.dim {
            return Err(Error::MalformedCode(format!(
                "dim is {} but generator has {} rows",
                file.dim,
                file.generator.len()
            )));
        }
        Self::from_generator(file.q, file.length, file.generator)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.to_file())?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: CodeFile =
            serde_json::from_str(s).map_err(|e| Error::MalformedCode(format!("invalid code document: {e}")))?;
        Self::from_file(file)
    }
}

impl MotherCode for LinearCode {
    fn alphabet(&self) -> usize {
        self.field.order()
    }

    fn length(&self) -> usize {
        self.length
    }

    fn message_alphabet(&self) -> usize {
        self.field.order()
    }

    fn message_len(&self) -> usize {
        self.dim()
    }

    fn encode(&self, message: &[Symbol]) -> Result<Vec<Symbol>> {
        if message.len() != self.dim() {
            return Err(Error::LengthMismatch { expected: self.dim(), found: message.len() });
        }
        check_symbols(message, self.field.order())?;
        let mut out = vec![0; self.length];
        for (&m, row) in message.iter().zip(&self.generator) {
            if m == 0 {
                continue;
            }
            for (o, &g) in out.iter_mut().zip(row) {
                *o = self.field.add(*o, self.field.mul(m, g));
            }
        }
        Ok(out)
    }

    fn contains(&self, word: &[Symbol]) -> bool {
        word.len() == self.length
            && word.iter().all(|&s| self.field.contains(s))
            && self.syndrome(word).iter().all(|&s| s == 0)
    }

    fn dimension(&self) -> Option<Ratio<u64>> {
        Some(Ratio::from_integer(self.dim() as u64))
    }

    fn enum_cap(&self) -> u128 {
        self.enum_cap
    }

    fn codewords(&self) -> Result<&[Vec<Symbol>]> {
        self.codewords.get_or_try_init(|| enumerate_by_encoding(self)).map(Vec::as_slice)
    }

    fn min_distance(&self) -> Result<usize> {
        self.min_weight()
    }
}
