pub mod analyze;
pub mod play;
pub mod reproduce;
pub mod run;
pub mod solve;
