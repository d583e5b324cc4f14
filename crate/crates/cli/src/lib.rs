//! Library surface of the `superpair` batch tool: the document model, the
//! report format and the command implementations.  The binary is a thin
//! argument-parsing wrapper around [`commands`].

pub mod commands;
pub mod doc;
pub mod report;
