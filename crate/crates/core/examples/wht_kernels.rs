//! The four Walsh-Hadamard kernels and their operation counts on one input.

use compadagrad::transforms::{
    wht_dense, wht_one_sparse_counted, wht_sparse_counted, wht_trimmed_counted, SparseVector,
};

fn main() -> compadagrad::Result<()> {
    let n = 1 << 12;
    let v = SparseVector::new(n, vec![(3, 1.0), (700, -2.0), (2048, 0.5)])?;
    let dense = wht_dense(&v.to_dense())?;

    let mut ops = 0;
    let one = wht_one_sparse_counted(n, 700, -2.0, &mut ops)?;
    println!("one-sparse: {ops} copies (n - 1 = {})", n - 1);
    assert_eq!(one[0], -2.0);

    let mut ops = 0;
    let sparse = wht_sparse_counted(&v, &mut ops)?;
    let err = sparse.iter().zip(&dense).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("3-sparse:   {ops} ops, max deviation from dense {err:.1e}");

    let rows = [5, 100, 1000, 4000];
    let mut ops = 0;
    let picked = wht_trimmed_counted(&v.to_dense(), &rows, &mut ops)?;
    println!("trimmed:    {ops} ops for {} rows, values {picked:?}", rows.len());
    Ok(())
}
