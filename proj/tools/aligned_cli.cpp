// Placeholder; the full CLI is wired up once the pipeline modules exist.
int main() { return 0; }
