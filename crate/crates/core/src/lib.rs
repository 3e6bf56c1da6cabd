pub mod diff;
pub mod gklo;
pub mod monopole;
pub mod quiver;
pub mod series;
pub mod symbolic;
pub mod verify;
