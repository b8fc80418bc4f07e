use crate::bits::BitString;
use crate::{Error, Result};

pub fn inner_product_mod2(a: &BitString, b: &BitString) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(a.len(), b.len()));
    }
    Ok((0..a.len()).filter(|&i| a.get(i) && b.get(i)).count() % 2 == 1)
}

/// Builds `x = x^1 … x^m`, `y = y^1 … y^m` with blocks of length `|a|`.
///
/// The first `m/3` blocks are `(a, b)`. Of the remaining `2m/3`, half are
/// `(0…0, 0…0)` with inner product 0 and half are `(10…0, 10…0)` with inner
/// product 1, so exactly `2m/3` blocks agree with `IP(a, b)`.
pub fn block_ip_instance(a: &BitString, b: &BitString, m: usize) -> Result<(BitString, BitString)> {
    if m == 0 || !m.is_multiple_of(6) {
        return Err(Error::InvalidParameter(format!("block count {m} must be a positive multiple of 6")));
    }
    if a.is_empty() {
        return Err(Error::InvalidParameter("blocks must be nonempty".into()));
    }
    inner_product_mod2(a, b)?;
    let len = a.len();
    let zero = BitString::zeros(len);
    let mut one = BitString::zeros(len);
    one.set(0, true);
    let (mut x, mut y) = (BitString::new(), BitString::new());
    let mut append = |bx: &BitString, by: &BitString| {
        bx.as_slice().iter().for_each(|&v| x.push(v));
        by.as_slice().iter().for_each(|&v| y.push(v));
    };
    for _ in 0..m / 3 {
        append(a, b);
    }
    for _ in 0..m / 3 {
        append(&zero, &zero);
    }
    for _ in 0..m / 3 {
        append(&one, &one);
    }
    Ok((x, y))
}

/// `Some(b)` if at least two thirds of the `block_len`-bit blocks have inner product `b`, else `None`.
pub fn block_ip_value(x: &BitString, y: &BitString, block_len: usize) -> Result<Option<bool>> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch(x.len(), y.len()));
    }
    if block_len == 0 || !x.len().is_multiple_of(block_len) {
        return Err(Error::InvalidParameter(format!("length {} is not a multiple of {block_len}", x.len())));
    }
    let m = x.len() / block_len;
    let block = |s: &BitString, j: usize| -> BitString {
        (j * block_len..(j + 1) * block_len).map(|i| s.get(i)).collect()
    };
    let mut ones = 0;
    for j in 0..m {
        ones += inner_product_mod2(&block(x, j), &block(y, j))? as usize;
    }
    Ok(if 3 * ones >= 2 * m {
        Some(true)
    } else if 3 * (m - ones) >= 2 * m {
        Some(false)
    } else {
        None
    })
}
