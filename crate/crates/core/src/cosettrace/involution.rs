use crate::error::{Error, Result};

/// `(H, F, T)` for a self-inverse map on `0..n`: points, fixed points and
/// orbits. Checks `F = 2T - H`.
pub fn involution_census(n: usize, inv: impl Fn(usize) -> usize) -> Result<(u64, u64, u64)> {
    let image: Vec<usize> = (0..n).map(&inv).collect();
    for (i, &j) in image.iter().enumerate() {
        if j >= n || image[j] != i {
            return Err(Error::invalid(format!(
                "map is not an involution at point {i}"
            )));
        }
    }
    let fixed = image.iter().enumerate().filter(|&(i, &j)| i == j).count() as u64;
    let mut seen = vec![false; n];
    let mut orbits = 0u64;
    for i in 0..n {
        if !seen[i] {
            seen[i] = true;
            seen[image[i]] = true;
            orbits += 1;
        }
    }
    let h = n as u64;
    if fixed + h != 2 * orbits {
        return Err(Error::violation(format!(
            "F = {fixed} but 2T - H = {}",
            2 * orbits as i64 - h as i64
        )));
    }
    Ok((h, fixed, orbits))
}
