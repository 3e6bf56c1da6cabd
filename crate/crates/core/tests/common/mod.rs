#![allow(dead_code)]

use gklo_core::gklo::GkloFamily;
use gklo_core::quiver::{DimensionData, FramedQuiver, QuiverWithInvolution};

pub fn framed(n: u32, v: &[u32], w: &[u32]) -> FramedQuiver {
    let raw = QuiverWithInvolution::aiii(n).expect("aiii quiver");
    let dims = DimensionData::from_lists(&raw.vertices, v, w);
    FramedQuiver::new(raw, dims).expect("valid dims")
}

pub fn family(n: u32, v: &[u32], w: &[u32]) -> GkloFamily {
    GkloFamily::new(framed(n, v, w)).expect("family builds")
}
