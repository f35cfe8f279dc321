//! Sparse grid representation of compact subsets of the unit cube, canonical
//! generators, neighborhoods, and an exact Euclidean distance transform.
//!
//! A [`SparseGrid`] stores the occupied cells of a uniform R×…×R grid over
//! [0,1]^n as a lexicographically sorted index list; the represented set is
//! the union of the occupied closed cells. Grids are immutable after
//! construction and every operation here is a pure function of its inputs.

mod distance;
mod generate;
mod grid;
mod io;

pub use distance::{distance_transform, distance_transform_padded, DistanceField};
pub use generate::{dilate, gen_cantor, gen_ifs, gen_kplane, gen_product, CantorSpec, IfsMap};
pub use grid::SparseGrid;
pub use io::{read_kpgrid, read_kpgrid_file, write_kpgrid, write_kpgrid_file};

pub(crate) use grid::sort_rows as grid_sort_rows;
