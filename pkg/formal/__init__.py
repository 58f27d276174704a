"""Exact layer: formal series, the genus-1 operator algebra, coefficient tables and forms."""
