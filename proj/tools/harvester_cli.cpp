// Placeholder main; the full CLI is assembled once all modules exist.
int main() { return 0; }
