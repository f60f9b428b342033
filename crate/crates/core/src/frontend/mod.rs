//! Text to phones to frame-level linguistic vectors.
//!
//! Each phone is encoded as previous/current/next one-hot identities (with a
//! reserved boundary symbol), the inventory's attribute flags plus word
//! boundary flags, and four positional slots: position in word, word
//! position in utterance, fractional position within the phone, and phone
//! duration in frames. The last two are filled only at frame level.

mod inventory;
mod labels;
mod lexicon;
mod linguistic;
mod phones;

pub use inventory::{Inventory, TOY_INVENTORY};
pub use labels::{read_labels, write_labels, DurationLabel};
pub use lexicon::Lexicon;
pub use linguistic::{frame_slots, phone_level_vectors, upsample_to_frames, vector_width, POSITIONAL_SLOTS};
pub use phones::{text_to_phones, PhoneSeq, PhoneToken};
