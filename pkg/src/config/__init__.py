# Configuration module