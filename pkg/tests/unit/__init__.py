# Unit tests - fast, exact fixtures and toy budgets
