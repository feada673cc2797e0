//! Tiles, bitiles, Walsh wave packets and trees.

mod index;
mod packet;
mod tile;
mod tree;

pub use index::BitileIndex;
pub use packet::{haar_function, modulated_haar_check, wave_packet, wave_packet_at, TileCoefficients};
pub use tile::{
    bitile_children, grid_bitiles, grid_tiles, parse_bitiles, tile_le, write_bitiles, Bitile,
    Rect, Tile,
};
pub use tree::{counting_function, counting_on_grid, Forest, Tree, TreeKind};
