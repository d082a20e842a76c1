//! Zobrist keys. Every component is XOR-combined, so keys can be updated
//! incrementally or recomputed from scratch with identical results.

const fn splitmix64(state: u64) -> (u64, u64) {
    let state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    (state, z ^ (z >> 31))
}

pub const POCKET_SLOTS: usize = 64;

pub struct ZobristKeys {
    pub pieces: [[[u64; 64]; 6]; 2],
    pub promoted: [u64; 64],
    pub pockets: [[[u64; POCKET_SLOTS]; 5]; 2],
    pub castling: [u64; 16],
    pub ep_file: [u64; 8],
    pub black_to_move: u64,
}

const fn build() -> ZobristKeys {
    let mut keys = ZobristKeys {
        pieces: [[[0; 64]; 6]; 2],
        promoted: [0; 64],
        pockets: [[[0; POCKET_SLOTS]; 5]; 2],
        castling: [0; 16],
        ep_file: [0; 8],
        black_to_move: 0,
    };
    let mut state = 0x5a48_2d63_7261_7a79u64;
    let mut c = 0;
    while c < 2 {
        let mut r = 0;
        while r < 6 {
            let mut s = 0;
            while s < 64 {
                let (ns, v) = splitmix64(state);
                state = ns;
                keys.pieces[c][r][s] = v;
                s += 1;
            }
            r += 1;
        }
        c += 1;
    }
    let mut s = 0;
    while s < 64 {
        let (ns, v) = splitmix64(state);
        state = ns;
        keys.promoted[s] = v;
        s += 1;
    }
    let mut c = 0;
    while c < 2 {
        let mut r = 0;
        while r < 5 {
            // Slot 0 (empty pocket) stays zero so an empty pocket contributes nothing.
            let mut n = 1;
            while n < POCKET_SLOTS {
                let (ns, v) = splitmix64(state);
                state = ns;
                keys.pockets[c][r][n] = v;
                n += 1;
            }
            r += 1;
        }
        c += 1;
    }
    let mut i = 1;
    while i < 16 {
        let (ns, v) = splitmix64(state);
        state = ns;
        keys.castling[i] = v;
        i += 1;
    }
    let mut f = 0;
    while f < 8 {
        let (ns, v) = splitmix64(state);
        state = ns;
        keys.ep_file[f] = v;
        f += 1;
    }
    let (_, v) = splitmix64(state);
    keys.black_to_move = v;
    keys
}

pub static KEYS: ZobristKeys = build();
