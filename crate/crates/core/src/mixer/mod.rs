//! Long-context data construction: length upsampling, sequence packing and
//! needle-in-a-haystack instances.

mod haystack;
mod pack;
mod upsample;

pub use haystack::{
    default_depths, default_lengths, haystack_grid, make_haystack, needle_offset, write_grid, HaystackInstance,
    NeedleSpec,
};
pub use pack::{pack_sequences, read_packed, write_packed, PackedSequence, Packer, Span};
pub use upsample::{copy_id, length_upsample, UpsampleWeights};
