pub mod compare;
pub mod fitline;
pub mod generate;
pub mod landscape;
pub mod oracle;
pub mod sample;
pub mod transfer;
