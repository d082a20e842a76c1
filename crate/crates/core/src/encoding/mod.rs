//! Network-facing encodings: the 34-plane input tensor and the two policy
//! index spaces (2272 UCI labels, 81×64 policy map).

mod planes;
mod policy;

pub use planes::{
    encode_planes, is_binary_plane, plane, InputPlanes, MOVE_COUNT_MAX, NO_PROGRESS_MAX, NUM_PLANES, PLANE_SIZE,
    POCKET_MAX,
};
pub use policy::{
    decode_index, legal_policy_mask, policy_index, policy_index_for, uci_labels, write_label_table, EncodingError,
    PolicyScheme, MAP_PLANES, MAP_SIZE, UCI_LABELS,
};
