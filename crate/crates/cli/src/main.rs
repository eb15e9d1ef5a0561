fn main() {
    // placeholder during bring-up
}
